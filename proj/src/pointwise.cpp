#include "psfm/pointwise.hpp"

#include <cmath>

namespace psfm {

Index PointwiseDecomposition::total_rank() const {
  Index s = 0;
  for (const auto& a : atoms) s += a.rank;
  return s;
}

PointwiseDecomposition decompose(const DiscretePSFM& e, const WeightSequence& alpha,
                                 double rank_tol) {
  PointwiseDecomposition p;
  p.dim = e.dim();
  p.mu = mu(e, alpha);
  const std::vector<Form> c = density(e, p.mu);
  for (std::size_t w = 0; w < e.size(); ++w) {
    p.labels.push_back(e.atom(w).label);
    AtomDecomposition a;
    if (p.mu.weights[w] > 0.0) {
      const QuotientBasis q = orthonormalize(c[w], rank_tol);
      a.rank = q.rank;
      a.d_rows = q.functionals;  // <d_k|phi> = C_w(g_k, phi)
      a.g_vectors = q.vectors;
    } else {
      a.d_rows.resize(0, e.dim());
      a.g_vectors.resize(e.dim(), 0);
    }
    p.atoms.push_back(std::move(a));
  }
  return p;
}

Complex reconstruct(const PointwiseDecomposition& p, std::span<const std::size_t> subset,
                    const Vector& phi, const Vector& psi) {
  if (phi.size() != p.dim || psi.size() != p.dim)
    throw InputError("reconstruct: vectors must have length " + std::to_string(p.dim));
  Complex acc = 0;
  for (std::size_t w : subset) {
    const AtomDecomposition& a = p.atoms.at(w);
    if (a.rank == 0) continue;
    const Vector dphi = a.d_rows * phi;
    const Vector dpsi = a.d_rows * psi;
    acc += dphi.dot(dpsi) * p.mu.weights[w];
  }
  return acc;
}

DirectIntegralModel direct_integral_model(const PointwiseDecomposition& p) {
  DirectIntegralModel m;
  for (const auto& a : p.atoms) {
    m.block_offsets.push_back(m.total_dim);
    m.block_dims.push_back(a.rank);
    m.total_dim += a.rank;
  }
  m.j1 = Matrix::Zero(m.total_dim, p.dim);
  for (std::size_t w = 0; w < p.atoms.size(); ++w) {
    const auto& a = p.atoms[w];
    Matrix f = Matrix::Zero(m.total_dim, m.total_dim);
    if (a.rank > 0) {
      m.j1.middleRows(m.block_offsets[w], a.rank) = a.d_rows * std::sqrt(p.mu.weights[w]);
      f.diagonal().segment(m.block_offsets[w], a.rank).setOnes();
    }
    m.f1_atoms.push_back(std::move(f));
  }
  return m;
}

NaimarkDilation DirectIntegralModel::as_dilation() const {
  NaimarkDilation d;
  d.kdim = total_dim;
  d.dim = j1.cols();
  d.j = j1;
  d.f_atoms = f1_atoms;
  for (std::size_t w = 0; w < block_dims.size(); ++w)
    for (Index k = 0; k < block_dims[w]; ++k) d.basis_provenance.push_back({w, k});
  return d;
}

DirectIntegralReport check_direct_integral(const DirectIntegralModel& model,
                                           const DiscretePSFM& e,
                                           const NaimarkDilation& gram_route, double tol,
                                           double equivalence_tol) {
  DirectIntegralReport r;
  const NaimarkDilation d = model.as_dilation();
  const double scale = max_abs(e.total().matrix());

  for (std::size_t w = 0; w < e.size(); ++w) {
    const Matrix compressed = d.j.adjoint() * d.f_atoms[w] * d.j;
    r.reconstruction_defect = std::max(
        r.reconstruction_defect, max_abs(Matrix(compressed - e.atom(w).form.matrix())));
  }
  r.reconstruction = r.reconstruction_defect <= tol * scale;

  // {F1(w) J1 e_i} must span every block.
  Matrix span(d.kdim, static_cast<Index>(e.size()) * d.dim);
  for (std::size_t w = 0; w < e.size(); ++w)
    span.middleCols(static_cast<Index>(w) * d.dim, d.dim) = d.f_atoms[w] * d.j;
  r.span_rank = numerical_rank(span);
  r.density = r.span_rank == d.kdim;

  r.kdim_gram_route = gram_route.kdim;
  r.intertwiner = unitary_equivalence(gram_route, d, e, equivalence_tol);
  r.equivalence = r.intertwiner.ok && gram_route.kdim == d.kdim;
  return r;
}

OnbReport onb_check(const PointwiseDecomposition& p, const DiscretePSFM& e, double tol) {
  if (!is_normalized(e, tol))
    throw PreconditionError("onb_check: measure is not normalized (E_Omega != I)");
  const DirectIntegralModel m = direct_integral_model(p);
  OnbReport r;
  r.count = p.dim;
  r.block_total = m.total_dim;
  const Matrix gram = m.j1.adjoint() * m.j1;
  r.gram_defect = max_abs(Matrix(gram - Matrix::Identity(p.dim, p.dim)));
  r.orthonormal_basis = r.count == r.block_total && r.gram_defect <= tol;
  return r;
}

}  // namespace psfm
