#pragma once

#include "psfm/dilation.hpp"

namespace psfm {

/// Per-atom rank decomposition C_w(phi, psi) = sum_k <phi|d_k><d_k|psi>.
struct AtomDecomposition {
  Index rank = 0;   // n(w)
  Matrix d_rows;    // n(w) x N, entry (k, n) = <d_k(w)|e_n>
  Matrix g_vectors; // N x n(w), the Gram-Schmidt survivors g_k(w)
};

struct PointwiseDecomposition {
  Index dim = 0;
  std::vector<std::string> labels;
  std::vector<AtomDecomposition> atoms;
  MuMeasure mu;

  Index total_rank() const;
};

PointwiseDecomposition decompose(const DiscretePSFM& e, const WeightSequence& alpha,
                                 double rank_tol = kDefaultRankTol);

/// sum_{w in X} sum_k <phi|d_k(w)><d_k(w)|psi> mu({w})
Complex reconstruct(const PointwiseDecomposition& p, std::span<const std::size_t> subset,
                    const Vector& phi, const Vector& psi);

/// Block model L^2_{n(.)}: atom w owns rows [offset_w, offset_w + n(w)) and
/// J1 phi carries (<d_k(w)|phi> sqrt(mu({w})))_k there, so the block space has
/// the plain Euclidean inner product.
struct DirectIntegralModel {
  std::vector<Index> block_dims;
  std::vector<Index> block_offsets;
  Index total_dim = 0;
  Matrix j1;                     // total_dim x N
  std::vector<Matrix> f1_atoms;  // diagonal block projections

  NaimarkDilation as_dilation() const;
};

DirectIntegralModel direct_integral_model(const PointwiseDecomposition& p);

struct DirectIntegralReport {
  bool reconstruction = false;
  bool density = false;
  bool equivalence = false;
  double reconstruction_defect = 0.0;
  Index span_rank = 0;
  Index kdim_gram_route = 0;
  Intertwiner intertwiner;
  bool passed() const { return reconstruction && density && equivalence; }
};

/// Checks the block model against E and against the Gram-route dilation.
DirectIntegralReport check_direct_integral(const DirectIntegralModel& model,
                                           const DiscretePSFM& e,
                                           const NaimarkDilation& gram_route,
                                           double tol = kDefaultVerifyTol,
                                           double equivalence_tol = 1e-9);

struct OnbReport {
  bool orthonormal_basis = false;
  Index count = 0;        // N
  Index block_total = 0;  // sum n(w)
  double gram_defect = 0.0;
};

/// Whether J1 e_0..J1 e_{N-1} is an orthonormal basis of the block space.
/// Requires E_Omega = I within tol.
OnbReport onb_check(const PointwiseDecomposition& p, const DiscretePSFM& e,
                    double tol = 1e-9);

}  // namespace psfm
