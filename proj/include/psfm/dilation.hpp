#pragma once

#include "psfm/measure.hpp"

#include <optional>

namespace psfm {

/// Spectral dilation (K, F, J) of a discrete PSFM.
///
/// K is realized as coordinates on the quotient of the spanning family
/// {e_i chi_w}, ordered atom-major. Every F_atom is diagonal with 0/1 entries
/// in these coordinates.
struct NaimarkDilation {
  struct Provenance {
    std::size_t atom;
    Index basis_index;
  };

  Index kdim = 0;
  Index dim = 0;
  std::vector<Matrix> f_atoms;  // kdim x kdim each
  Matrix j;                     // kdim x dim
  std::vector<Provenance> basis_provenance;
};

NaimarkDilation dilate(const DiscretePSFM& e, const WeightSequence& alpha,
                       double rank_tol = kDefaultRankTol);

struct DilationReport {
  bool reconstruction = false;
  bool projection = false;
  bool minimality = false;
  bool norm_eq = false;

  double reconstruction_defect = 0.0;  // max |<Je_i|F(w)Je_j> - E_w(i,j)|
  double projection_defect = 0.0;      // idempotency, self-adjointness, overlap
  double resolution_defect = 0.0;      // |sum_w F(w) - I|
  Index span_rank = 0;                 // rank of {F(w) J e_i}
  double norm_defect = 0.0;            // max | |Je_i|^2 - E_Omega(i,i) |
  double scale = 0.0;                  // |E_Omega|_max

  bool passed() const { return reconstruction && projection && minimality && norm_eq; }
};

/// Itemized check of a candidate dilation against E. Value identities are
/// compared at tol * |E_Omega|_max, projection identities at tol.
DilationReport verify_dilation(const DiscretePSFM& e, const NaimarkDilation& d,
                               double tol = kDefaultVerifyTol);

struct Intertwiner {
  bool ok = false;
  std::string reason;
  Matrix u;  // kdim2 x kdim1
  double isometry_defect = 0.0;     // Gram matrices of the spanning families
  double unitarity_defect = 0.0;    // |U^H U - I|, |U U^H - I|
  double j_defect = 0.0;            // |U J1 - J2|
  double intertwining_defect = 0.0; // max_w |U F1(w) - F2(w) U|

  double max_defect() const;
};

/// Builds U from F1(w)J1 e_i -> F2(w)J2 e_i on the spanning family.
/// Fails when the dimensions or the atom counts differ or any defect exceeds
/// tol (scaled by |E_Omega|_max for the isometry defect).
Intertwiner unitary_equivalence(const NaimarkDilation& d1, const NaimarkDilation& d2,
                                const DiscretePSFM& e, double tol = 1e-9);

struct SpectralCheck {
  bool spectral = false;            // kdim == N and J unitary
  bool idempotent_atoms = false;    // oracle: every E_0({w})^2 = E_0({w})
  double j_defect = 0.0;
  double idempotency_defect = 0.0;
  bool agree() const { return spectral == idempotent_atoms; }
};

/// Requires E_Omega = I within tol; throws PreconditionError otherwise.
SpectralCheck is_spectral(const DiscretePSFM& e, const NaimarkDilation& d,
                          double tol = 1e-9);

/// Direct check that every atom matrix is idempotent, max defect.
double idempotency_defect(const DiscretePSFM& e);

/// Numerical rank via eigenvalues of A^H A relative to the largest one.
Index numerical_rank(const Matrix& a, double rel_tol = 1e-10);

}  // namespace psfm
