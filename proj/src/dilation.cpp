#include "psfm/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace psfm {
namespace {

// Columns F(w) J e_i, atom-major: the image of the spanning family in K.
Matrix spanning_family(const NaimarkDilation& d) {
  const Index m = static_cast<Index>(d.f_atoms.size());
  Matrix a(d.kdim, m * d.dim);
  for (Index w = 0; w < m; ++w)
    a.middleCols(w * d.dim, d.dim) = d.f_atoms[static_cast<std::size_t>(w)] * d.j;
  return a;
}

}  // namespace

Index numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  const Matrix g = a.rows() <= a.cols() ? Matrix(a * a.adjoint())
                                        : Matrix(a.adjoint() * a);
  const Eigen::VectorXd ev = hermitian_eigenvalues(g);
  const double top = ev(ev.size() - 1);
  if (top <= 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > rel_tol * top) ++r;
  return r;
}

NaimarkDilation dilate(const DiscretePSFM& e, const WeightSequence& alpha,
                       double rank_tol) {
  const Index n = e.dim();
  const Index m = static_cast<Index>(e.size());
  const MuMeasure weights = mu(e, alpha);
  const std::vector<Form> c = density(e, weights);

  // theta((e_i, w), (e_j, w')) = delta_{ww'} C_w(e_i, e_j) mu({w})
  Matrix theta = Matrix::Zero(m * n, m * n);
  for (Index w = 0; w < m; ++w) {
    const auto wi = static_cast<std::size_t>(w);
    theta.block(w * n, w * n, n, n) = c[wi].matrix() * weights.weights[wi];
  }
  const QuotientBasis q = orthonormalize(Form(std::move(theta)), rank_tol);

  NaimarkDilation d;
  d.kdim = q.rank;
  d.dim = n;
  d.f_atoms.assign(static_cast<std::size_t>(m), Matrix::Zero(q.rank, q.rank));
  for (Index k = 0; k < q.rank; ++k) {
    const Index src = q.source_index[static_cast<std::size_t>(k)];
    const auto w = static_cast<std::size_t>(src / n);
    d.f_atoms[w](k, k) = 1.0;
    d.basis_provenance.push_back({w, src % n});
  }
  // J e_i = [e_i chi_Omega] = sum_w [e_i chi_w]
  d.j = Matrix::Zero(q.rank, n);
  for (Index w = 0; w < m; ++w) d.j += q.functionals.middleCols(w * n, n);
  return d;
}

DilationReport verify_dilation(const DiscretePSFM& e, const NaimarkDilation& d,
                               double tol) {
  if (d.dim != e.dim() || d.f_atoms.size() != e.size() || d.j.rows() != d.kdim ||
      d.j.cols() != d.dim)
    throw InputError("verify_dilation: dilation shape does not match measure");

  DilationReport r;
  const Matrix total = e.total().matrix();
  r.scale = max_abs(total);
  const Matrix id = Matrix::Identity(d.kdim, d.kdim);

  Matrix sum = Matrix::Zero(d.kdim, d.kdim);
  for (std::size_t w = 0; w < e.size(); ++w) {
    const Matrix& f = d.f_atoms[w];
    if (f.rows() != d.kdim || f.cols() != d.kdim)
      throw InputError("verify_dilation: projection has wrong shape");
    const Matrix compressed = d.j.adjoint() * f * d.j;
    r.reconstruction_defect = std::max(
        r.reconstruction_defect, max_abs(Matrix(compressed - e.atom(w).form.matrix())));
    r.projection_defect = std::max(
        {r.projection_defect, max_abs(Matrix(f * f - f)), max_abs(Matrix(f - f.adjoint()))});
    for (std::size_t v = w + 1; v < e.size(); ++v)
      r.projection_defect =
          std::max(r.projection_defect, max_abs(Matrix(f * d.f_atoms[v])));
    sum += f;
  }
  r.resolution_defect = max_abs(Matrix(sum - id));

  const Matrix span = spanning_family(d);
  r.span_rank = numerical_rank(span);

  for (Index i = 0; i < d.dim; ++i)
    r.norm_defect = std::max(
        r.norm_defect, std::abs(d.j.col(i).squaredNorm() - total(i, i).real()));

  r.reconstruction = r.reconstruction_defect <= tol * r.scale;
  r.projection = r.projection_defect <= tol && r.resolution_defect <= tol;
  r.minimality = r.span_rank == d.kdim;
  r.norm_eq = r.norm_defect <= tol * r.scale;
  return r;
}

double Intertwiner::max_defect() const {
  return std::max({isometry_defect, unitarity_defect, j_defect, intertwining_defect});
}

Intertwiner unitary_equivalence(const NaimarkDilation& d1, const NaimarkDilation& d2,
                                const DiscretePSFM& e, double tol) {
  Intertwiner out;
  if (d1.kdim != d2.kdim || d1.dim != d2.dim || d1.f_atoms.size() != d2.f_atoms.size()) {
    out.reason = "dilation dimensions differ (" + std::to_string(d1.kdim) + " vs " +
                 std::to_string(d2.kdim) + ")";
    return out;
  }
  const Matrix a1 = spanning_family(d1);
  const Matrix a2 = spanning_family(d2);
  const Matrix g1 = a1.adjoint() * a1;
  const Matrix g2 = a2.adjoint() * a2;
  const double scale = std::max(max_abs(e.total().matrix()), 1e-300);
  out.isometry_defect = max_abs(Matrix(g1 - g2)) / scale;

  // Orthonormal combinations of the spanning family, in either copy.
  const QuotientBasis q = orthonormalize(Form(g1));
  if (q.rank != d1.kdim) {
    out.reason = "spanning family is not total in K1 (rank " + std::to_string(q.rank) +
                 " < " + std::to_string(d1.kdim) + ")";
    out.u = Matrix::Zero(d2.kdim, d1.kdim);
    return out;
  }
  const Matrix basis1 = a1 * q.vectors;
  const Matrix basis2 = a2 * q.vectors;
  out.u = basis2 * basis1.adjoint();

  const Matrix id = Matrix::Identity(d1.kdim, d1.kdim);
  out.unitarity_defect = std::max(max_abs(Matrix(out.u.adjoint() * out.u - id)),
                                  max_abs(Matrix(out.u * out.u.adjoint() - id)));
  out.j_defect = max_abs(Matrix(out.u * d1.j - d2.j));
  for (std::size_t w = 0; w < d1.f_atoms.size(); ++w)
    out.intertwining_defect =
        std::max(out.intertwining_defect,
                 max_abs(Matrix(out.u * d1.f_atoms[w] - d2.f_atoms[w] * out.u)));

  out.ok = out.max_defect() <= tol;
  if (!out.ok) out.reason = "defect " + std::to_string(out.max_defect()) + " exceeds tolerance";
  return out;
}

double idempotency_defect(const DiscretePSFM& e) {
  double worst = 0.0;
  for (const Atom& a : e.atoms()) {
    const Matrix& p = a.form.matrix();
    worst = std::max(worst, max_abs(Matrix(p * p - p)));
  }
  return worst;
}

SpectralCheck is_spectral(const DiscretePSFM& e, const NaimarkDilation& d, double tol) {
  if (!is_normalized(e, tol))
    throw PreconditionError("is_spectral: measure is not normalized (E_Omega != I)");
  SpectralCheck s;
  s.idempotency_defect = idempotency_defect(e);
  s.idempotent_atoms = s.idempotency_defect <= tol;
  if (d.kdim == d.dim) {
    const Matrix id = Matrix::Identity(d.dim, d.dim);
    s.j_defect = std::max(max_abs(Matrix(d.j.adjoint() * d.j - id)),
                          max_abs(Matrix(d.j * d.j.adjoint() - id)));
    s.spectral = s.j_defect <= tol;
  } else {
    s.j_defect = std::numeric_limits<double>::infinity();
  }
  return s;
}

}  // namespace psfm
