#pragma once

#include "psfm/pointwise.hpp"

namespace psfm {

/// Lambda = sum_n beta_n |e_n><e_n| with beta_n = alpha_n / (1 + E_Omega(e_n, e_n)).
struct LambdaOperator {
  std::vector<double> betas;

  Index dim() const { return static_cast<Index>(betas.size()); }
  // Lambda^p as a dense diagonal matrix.
  Matrix power(double p) const;
  double trace() const;
};

LambdaOperator lambda_operator(const DiscretePSFM& e, const WeightSequence& alpha);

/// sqrt(sum_n |a_n|^2 / beta_n^gamma); gamma = 0 is the Euclidean norm.
double h_gamma_norm(const Vector& phi, const LambdaOperator& lambda, double gamma);

struct DensityOperator {
  Matrix t;                   // N x N, positive, trace one on mu-positive atoms
  Matrix h_vectors;           // N x n(w), T = sum_k h_k h_k^H
  double trace = 0.0;
  Index rank = 0;             // eps-rank of T
  Eigen::VectorXd eigenvalues;  // descending
  double ell2_bound = 0.0;    // max_k sum_n |<d_k|e_n>|^2 beta_n, must be <= 1
};

/// T(w) = sum_k Lambda^{1/2}|d_k(w)><d_k(w)|Lambda^{1/2}. Throws
/// ConsistencyError naming the atom when |tr T - 1| > tol on a mu-positive atom.
std::vector<DensityOperator> density_operators(const PointwiseDecomposition& p,
                                               const LambdaOperator& lambda,
                                               double tol = kDefaultVerifyTol,
                                               double rank_tol = kDefaultRankTol);

/// Operator-measure route: F(w) = Lambda^{1/2} E_0({w}) Lambda^{1/2},
/// T(w) = F(w) / mu({w}), split by eigendecomposition with eigenvalues sorted
/// descending so the h_k are orthogonal with non-increasing norms.
std::vector<DensityOperator> pom_density_route(const DiscretePSFM& e,
                                               const WeightSequence& alpha,
                                               double tol = kDefaultVerifyTol,
                                               double rank_tol = kDefaultRankTol);

struct RouteCrossCheck {
  bool agree = false;
  double max_entry_difference = 0.0;
  double max_trace_defect = 0.0;        // over mu-positive atoms
  double mass_defect = 0.0;             // |sum_w tr T(w) mu(w) - mu(Omega)|
  double reconstruction_defect = 0.0;   // <L^-1/2 e_i|T L^-1/2 e_j> mu - E_w(i,j)
  double total_variation = 0.0;         // sum_w tr F(w)
  double total_variation_bound = 0.0;   // tr Lambda * |E_0(Omega)|
  std::vector<std::size_t> rank_mismatches;
};

RouteCrossCheck cross_check_routes(const DiscretePSFM& e, const WeightSequence& alpha,
                                   const PointwiseDecomposition& p,
                                   const std::vector<DensityOperator>& sesquilinear_route,
                                   const std::vector<DensityOperator>& operator_route,
                                   double tol = kDefaultVerifyTol);

}  // namespace psfm
