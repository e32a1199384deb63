#include "psfm/spectral.hpp"

#include "psfm/shifts.hpp"
#include "psfm/traceclass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace psfm {

RowFiniteOperator RowFiniteOperator::from_dense(const Matrix& m, long first_index) {
  RowFiniteOperator op;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      if (m(r, c) != Complex(0.0))
        op.add(first_index + static_cast<long>(r), first_index + static_cast<long>(c), m(r, c));
  return op;
}

void RowFiniteOperator::add(long row, long col, Complex value) {
  auto& entries = rows_[row];
  for (auto& e : entries)
    if (e.col == col) {
      e.value += value;
      return;
    }
  entries.push_back({col, value});
}

std::span<const RowFiniteOperator::Entry> RowFiniteOperator::row(long r) const {
  const auto it = rows_.find(r);
  if (it == rows_.end()) return {};
  return it->second;
}

RowFiniteOperator RowFiniteOperator::adjoint() const {
  RowFiniteOperator out;
  for (const auto& [r, entries] : rows_)
    for (const auto& e : entries) out.add(e.col, r, std::conj(e.value));
  return out;
}

Matrix RowFiniteOperator::section(long first, Index size) const {
  Matrix m = Matrix::Zero(size, size);
  const long last = first + static_cast<long>(size);
  for (auto it = rows_.lower_bound(first); it != rows_.end() && it->first < last; ++it)
    for (const auto& e : it->second)
      if (e.col >= first && e.col < last)
        m(static_cast<Index>(it->first - first), static_cast<Index>(e.col - first)) += e.value;
  return m;
}

std::vector<long> supported_rows(const RowFiniteOperator& t, const CoefficientSequence& d) {
  std::vector<long> out;
  for (long n = d.first; n <= d.last(); ++n) {
    const auto row = t.row(n);
    if (std::all_of(row.begin(), row.end(), [&](const auto& e) { return d.contains(e.col); }))
      out.push_back(n);
  }
  return out;
}

Vector tilde_apply(const RowFiniteOperator& t, const CoefficientSequence& d,
                   std::span<const long> rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Complex acc = 0;
    for (const auto& e : t.row(rows[i])) {
      if (!d.contains(e.col))
        throw InputError("tilde_apply: row " + std::to_string(rows[i]) + " references index " +
                         std::to_string(e.col) + " outside the sequence window");
      acc += e.value * d.at(e.col);
    }
    out(static_cast<Index>(i)) = acc;
  }
  return out;
}

CoefficientSequence tilde_apply(const RowFiniteOperator& t, const CoefficientSequence& d) {
  std::vector<long> rows(static_cast<std::size_t>(d.values.size()));
  std::iota(rows.begin(), rows.end(), d.first);
  return {d.first, tilde_apply(t, d, rows)};
}

RowFiniteOperator unit_shift(long lo, long hi) {
  RowFiniteOperator s;
  for (long n = lo; n <= hi; ++n) s.add(n, n + 1, 1.0);
  return s;
}

std::optional<ShiftEigenvector> shift_eigensolve(Complex lambda, long half_width, double tol) {
  if (lambda == Complex(0.0)) return std::nullopt;
  if (half_width < 0) throw InputError("shift_eigensolve: negative window");

  ShiftEigenvector out;
  out.d.first = -half_width;
  out.d.values.resize(2 * half_width + 1);
  // d_j = lambda^j by the recurrence d_{j+1} = lambda d_j from d_0 = 1.
  out.d.values(half_width) = 1.0;
  for (long j = 1; j <= half_width; ++j) {
    out.d.values(half_width + j) = out.d.values(half_width + j - 1) * lambda;
    out.d.values(half_width - j) = out.d.values(half_width - j + 1) / lambda;
  }
  const double scale = max_abs(out.d.values);

  const RowFiniteOperator s = unit_shift(-half_width - 1, half_width + 1);
  const RowFiniteOperator s_adj = s.adjoint();
  const std::vector<long> rows = supported_rows(s, out.d);
  const Vector sd = tilde_apply(s, out.d, rows);
  const std::vector<long> adj_rows = supported_rows(s_adj, out.d);
  const Vector sad = tilde_apply(s_adj, out.d, adj_rows);
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.residual = std::max(out.residual,
                            std::abs(sd(static_cast<Index>(i)) - lambda * out.d.at(rows[i])) / scale);
  for (std::size_t i = 0; i < adj_rows.size(); ++i)
    out.adjoint_residual =
        std::max(out.adjoint_residual,
                 std::abs(sad(static_cast<Index>(i)) - std::conj(lambda) * out.d.at(adj_rows[i])) /
                     scale);
  out.simultaneous = out.adjoint_residual <= tol;
  return out;
}

SpectralProjections spectral_projections(const Matrix& t, double cluster_tol,
                                         double normality_tol) {
  if (t.rows() != t.cols()) throw InputError("spectral_projections: matrix must be square");
  SpectralProjections out;
  const double norm = t.norm();  // Frobenius
  out.normality_defect = max_abs(Matrix(t * t.adjoint() - t.adjoint() * t));
  if (out.normality_defect > normality_tol * norm * norm)
    throw PreconditionError("matrix is not normal: |TT^H - T^H T|_max = " +
                            std::to_string(out.normality_defect));
  const Index n = t.rows();
  if (n == 0) return out;

  Eigen::ComplexSchur<Matrix> schur(t);
  const Matrix& u = schur.matrixU();
  const Eigen::VectorXcd ev = schur.matrixT().diagonal();

  // Single-linkage clustering at the absolute gap cluster_tol * |T|_F.
  const double gap = cluster_tol * norm;
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
    return i;
  };
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      if (std::abs(ev(a) - ev(b)) <= gap) parent[static_cast<std::size_t>(find(b))] = find(a);

  std::map<Index, std::vector<Index>> clusters;
  for (Index a = 0; a < n; ++a) clusters[find(a)].push_back(a);

  struct Cluster {
    Complex point;
    std::vector<Index> members;
  };
  std::vector<Cluster> sorted;
  for (auto& [root, members] : clusters) {
    Complex mean = 0;
    for (Index a : members) mean += ev(a);
    sorted.push_back({mean / static_cast<double>(members.size()), members});
  }
  std::sort(sorted.begin(), sorted.end(), [](const Cluster& x, const Cluster& y) {
    if (x.point.real() != y.point.real()) return x.point.real() < y.point.real();
    return x.point.imag() < y.point.imag();
  });
  for (const Cluster& c : sorted) {
    Matrix basis(n, static_cast<Index>(c.members.size()));
    for (std::size_t k = 0; k < c.members.size(); ++k)
      basis.col(static_cast<Index>(k)) = u.col(c.members[k]);
    out.points.push_back(c.point);
    out.projections.push_back(basis * basis.adjoint());
  }
  return out;
}

GeneralizedEigensystem spectral_expand(const Matrix& t, const WeightSequence& alpha, double tol,
                                       double cluster_tol, double normality_tol) {
  const SpectralProjections sp = spectral_projections(t, cluster_tol, normality_tol);
  const Index n = t.rows();

  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < sp.points.size(); ++j)
    atoms.push_back({"lambda_" + std::to_string(j), Form(sp.projections[j])});
  const DiscretePSFM e(n, std::move(atoms));
  const PointwiseDecomposition p = decompose(e, alpha);
  const LambdaOperator lambda = lambda_operator(e, alpha);

  GeneralizedEigensystem g;
  g.normality_defect = sp.normality_defect;
  const RowFiniteOperator op = RowFiniteOperator::from_dense(t);
  const RowFiniteOperator op_adj = op.adjoint();
  const double t_scale = std::max(1.0, max_abs(t));

  Matrix expansion = Matrix::Zero(n, n);
  Matrix identity = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < sp.points.size(); ++j) {
    const AtomDecomposition& a = p.atoms[j];
    SpectralPoint pt{sp.points[j], a.rank, p.mu.weights[j], a.d_rows};
    const Matrix outer = a.d_rows.adjoint() * a.d_rows * pt.mu;  // sum_k |d_k><d_k| mu
    expansion += pt.lambda * outer;
    identity += outer;

    for (Index k = 0; k < a.rank; ++k) {
      // <e_n|d> = conj(<d|e_n>)
      const CoefficientSequence d{0, a.d_rows.row(k).adjoint()};
      const double d_scale = max_abs(d.values) * t_scale;
      const Vector td = tilde_apply(op, d).values;
      const Vector tad = tilde_apply(op_adj, d).values;
      g.eigen_residual =
          std::max(g.eigen_residual, max_abs(Vector(td - pt.lambda * d.values)) / d_scale);
      g.adjoint_residual = std::max(
          g.adjoint_residual, max_abs(Vector(tad - std::conj(pt.lambda) * d.values)) / d_scale);
      double s = 0.0;
      for (Index m = 0; m < n; ++m)
        s += std::norm(a.d_rows(k, m)) * lambda.betas[static_cast<std::size_t>(m)];
      g.size_bound = std::max(g.size_bound, s);
    }
    g.points.push_back(std::move(pt));
  }
  g.expansion_residual = max_abs(Matrix(expansion - t)) / t_scale;
  g.identity_residual = max_abs(Matrix(identity - Matrix::Identity(n, n)));
  g.passed = g.expansion_residual <= tol && g.identity_residual <= tol &&
             g.eigen_residual <= tol && g.adjoint_residual <= tol && g.size_bound <= 1.0 + tol;
  return g;
}

HaarReport haar_recovery(long half_width, long grid, std::span<const HaarArc> arcs, double tol) {
  if (half_width < 0) throw InputError("haar_recovery: negative window");
  if (grid <= 2 * half_width)
    throw InputError("haar_recovery: grid size " + std::to_string(grid) +
                     " aliases the window (need M > 2J = " + std::to_string(2 * half_width) + ")");
  HaarReport r;
  r.half_width = half_width;
  r.grid = grid;
  const double two_pi = 2.0 * std::numbers::pi;
  // lambda_j^q with the exponent reduced mod M before forming the angle.
  auto power = [&](long j, long q) {
    const long k = ((j * q) % grid + grid) % grid;
    const double angle = two_pi * static_cast<double>(k) / static_cast<double>(grid);
    return Complex(std::cos(angle), std::sin(angle));
  };
  auto grid_moment = [&](long begin, long end, long q) {
    Complex acc = 0;
    for (long j = begin; j < end; ++j) acc += power(j, q);
    return acc / static_cast<double>(grid);
  };

  for (long q = -2 * half_width; q <= 2 * half_width; ++q)
    r.fourier_defect = std::max(r.fourier_defect,
                                std::abs(grid_moment(0, grid, q) - (q == 0 ? 1.0 : 0.0)));

  const Index size = 2 * half_width + 1;
  auto grid_form = [&](long begin, long end) {
    Matrix m(size, size);
    for (Index a = 0; a < size; ++a)
      for (Index b = 0; b < size; ++b) m(a, b) = grid_moment(begin, end, a - b);
    return m;
  };
  const ShiftWeights unit = ShiftWeights::constant(-half_width, half_width, 1.0);
  const Matrix full = grid_form(0, grid);
  r.full_circle_defect = max_abs(Matrix(full - Matrix::Identity(size, size)));
  r.arc_form_full_defect = max_abs(Matrix(full - arc_form(unit, 0.0, two_pi).matrix()));

  bool arcs_ok = true;
  for (const HaarArc& arc : arcs) {
    if (arc.begin < 0 || arc.begin > arc.end || arc.end > grid)
      throw InputError("haar_recovery: arc must satisfy 0 <= begin <= end <= M");
    const double t0 = two_pi * static_cast<double>(arc.begin) / static_cast<double>(grid);
    const double t1 = two_pi * static_cast<double>(arc.end) / static_cast<double>(grid);
    const double err = max_abs(Matrix(grid_form(arc.begin, arc.end) - arc_form(unit, t0, t1).matrix()));
    const double bound = (t1 - t0) * static_cast<double>(2 * half_width) / (2.0 * static_cast<double>(grid));
    r.arc_error = std::max(r.arc_error, err);
    r.arc_error_bound = std::max(r.arc_error_bound, bound);
    if (err > bound + tol) arcs_ok = false;
  }
  r.passed = r.fourier_defect <= tol && r.full_circle_defect <= tol &&
             r.arc_form_full_defect <= 1e-12 && arcs_ok;
  return r;
}

}  // namespace psfm
