#include "psfm/traceclass.hpp"

#include <cmath>
#include <numeric>

namespace psfm {
namespace {

// Eigenvalues descending, with rank counted at rank_tol * max diagonal.
void fill_spectrum(DensityOperator& op, double rank_tol) {
  const Index n = op.t.rows();
  op.trace = op.t.trace().real();
  op.eigenvalues = hermitian_eigenvalues(op.t).reverse();
  const double threshold = rank_tol * max_diagonal(op.t);
  op.rank = 0;
  if (threshold > 0.0)
    for (Index i = 0; i < n; ++i)
      if (op.eigenvalues(i) > threshold) ++op.rank;
}

}  // namespace

Matrix LambdaOperator::power(double p) const {
  Matrix m = Matrix::Zero(dim(), dim());
  for (Index n = 0; n < dim(); ++n) m(n, n) = std::pow(betas[static_cast<std::size_t>(n)], p);
  return m;
}

double LambdaOperator::trace() const {
  return std::accumulate(betas.begin(), betas.end(), 0.0);
}

LambdaOperator lambda_operator(const DiscretePSFM& e, const WeightSequence& alpha) {
  if (alpha.size() < e.dim())
    throw InputError("weight sequence shorter than the test space dimension");
  const Matrix total = e.total().matrix();
  LambdaOperator l;
  for (Index n = 0; n < e.dim(); ++n)
    l.betas.push_back(alpha[n] / (1.0 + total(n, n).real()));
  return l;
}

double h_gamma_norm(const Vector& phi, const LambdaOperator& lambda, double gamma) {
  if (phi.size() != lambda.dim())
    throw InputError("h_gamma_norm: vector length does not match Lambda");
  double s = 0.0;
  for (Index n = 0; n < phi.size(); ++n)
    s += std::norm(phi(n)) / std::pow(lambda.betas[static_cast<std::size_t>(n)], gamma);
  return std::sqrt(s);
}

std::vector<DensityOperator> density_operators(const PointwiseDecomposition& p,
                                               const LambdaOperator& lambda, double tol,
                                               double rank_tol) {
  if (lambda.dim() != p.dim) throw InputError("density_operators: Lambda dimension mismatch");
  const Matrix sqrt_lambda = lambda.power(0.5);
  std::vector<DensityOperator> out;
  for (std::size_t w = 0; w < p.atoms.size(); ++w) {
    const AtomDecomposition& a = p.atoms[w];
    DensityOperator op;
    // <h_k|phi> = <d_k|Lambda^{1/2} phi>, so h_k = Lambda^{1/2} d_row^H.
    op.h_vectors = sqrt_lambda * a.d_rows.adjoint();
    op.t = op.h_vectors * op.h_vectors.adjoint();
    for (Index k = 0; k < a.rank; ++k)
      op.ell2_bound = std::max(op.ell2_bound, op.h_vectors.col(k).squaredNorm());
    fill_spectrum(op, rank_tol);
    if (p.mu.weights[w] > 0.0 && std::abs(op.trace - 1.0) > tol)
      throw ConsistencyError("atom '" + p.labels[w] + "': tr T = " +
                             std::to_string(op.trace) + " differs from 1");
    out.push_back(std::move(op));
  }
  return out;
}

std::vector<DensityOperator> pom_density_route(const DiscretePSFM& e,
                                               const WeightSequence& alpha, double tol,
                                               double rank_tol) {
  const LambdaOperator lambda = lambda_operator(e, alpha);
  const MuMeasure m = mu(e, alpha);
  const Matrix sqrt_lambda = lambda.power(0.5);
  std::vector<DensityOperator> out;
  for (std::size_t w = 0; w < e.size(); ++w) {
    DensityOperator op;
    if (m.weights[w] > 0.0) {
      const Matrix f = sqrt_lambda * e.atom(w).form.matrix() * sqrt_lambda;
      op.t = f / m.weights[w];
    } else {
      op.t = Matrix::Zero(e.dim(), e.dim());
    }
    fill_spectrum(op, rank_tol);

    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix((op.t + op.t.adjoint()) * 0.5));
    op.h_vectors.resize(e.dim(), op.rank);
    for (Index k = 0; k < op.rank; ++k) {
      const Index col = e.dim() - 1 - k;  // solver sorts ascending
      op.h_vectors.col(k) = es.eigenvectors().col(col) * std::sqrt(es.eigenvalues()(col));
    }
    for (Index k = 0; k < op.rank; ++k)
      op.ell2_bound = std::max(op.ell2_bound, op.h_vectors.col(k).squaredNorm());
    if (m.weights[w] > 0.0 && std::abs(op.trace - 1.0) > tol)
      throw ConsistencyError("atom '" + e.atom(w).label + "': tr T = " +
                             std::to_string(op.trace) + " differs from 1");
    out.push_back(std::move(op));
  }
  return out;
}

RouteCrossCheck cross_check_routes(const DiscretePSFM& e, const WeightSequence& alpha,
                                   const PointwiseDecomposition& p,
                                   const std::vector<DensityOperator>& sesquilinear_route,
                                   const std::vector<DensityOperator>& operator_route,
                                   double tol) {
  if (sesquilinear_route.size() != e.size() || operator_route.size() != e.size())
    throw InputError("cross_check_routes: atom count mismatch");
  RouteCrossCheck r;
  const LambdaOperator lambda = lambda_operator(e, alpha);
  const Matrix inv_sqrt = lambda.power(-0.5);
  const Matrix sqrt_lambda = lambda.power(0.5);

  double mass = 0.0;
  for (std::size_t w = 0; w < e.size(); ++w) {
    const DensityOperator& a = sesquilinear_route[w];
    const DensityOperator& b = operator_route[w];
    const double weight = p.mu.weights[w];
    r.max_entry_difference = std::max(r.max_entry_difference, max_abs(Matrix(a.t - b.t)));
    if (weight > 0.0) {
      r.max_trace_defect = std::max(
          {r.max_trace_defect, std::abs(a.trace - 1.0), std::abs(b.trace - 1.0)});
    }
    if (a.rank != p.atoms[w].rank || b.rank != p.atoms[w].rank) r.rank_mismatches.push_back(w);
    mass += b.trace * weight;

    const Matrix rebuilt = inv_sqrt * b.t * inv_sqrt * weight;
    r.reconstruction_defect =
        std::max(r.reconstruction_defect, max_abs(Matrix(rebuilt - e.atom(w).form.matrix())));
    r.total_variation += (sqrt_lambda * e.atom(w).form.matrix() * sqrt_lambda).trace().real();
  }
  r.mass_defect = std::abs(mass - p.mu.total());
  const Eigen::VectorXd ev = hermitian_eigenvalues(e.total().matrix());
  r.total_variation_bound = lambda.trace() * (ev.size() ? ev(ev.size() - 1) : 0.0);

  const double scale = std::max(1.0, max_abs(e.total().matrix()));
  r.agree = r.max_entry_difference <= tol && r.max_trace_defect <= tol &&
            r.mass_defect <= tol && r.reconstruction_defect <= tol * scale &&
            r.rank_mismatches.empty() &&
            r.total_variation <= r.total_variation_bound * (1.0 + tol) + tol;
  return r;
}

}  // namespace psfm
