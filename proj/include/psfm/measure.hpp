#pragma once

#include "psfm/forms.hpp"

#include <span>
#include <string>
#include <vector>

namespace psfm {

struct Atom {
  std::string label;
  Form form;
};

/// Positive sesquilinear form measure over a finite atomic outcome set.
/// E_X is the entrywise sum of the atom forms in X, so additivity over
/// disjoint subsets holds exactly.
class DiscretePSFM {
 public:
  DiscretePSFM() = default;

  /// Throws InputError on dimension mismatch. With `validate`, every atom
  /// must also pass is_positive(tol) or InputError names the offender.
  DiscretePSFM(Index dim, std::vector<Atom> atoms, bool validate = true,
               double tol = kDefaultPsdTol);

  Index dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& atom(std::size_t i) const { return atoms_.at(i); }

  Form on(std::span<const std::size_t> subset) const;
  Form total() const;

 private:
  Index dim_ = 0;
  std::vector<Atom> atoms_;
};

/// Summable positive weights alpha_0, alpha_1, ... used to build mu.
class WeightSequence {
 public:
  explicit WeightSequence(std::vector<double> alphas);

  /// alpha_n = 2^{-(n+1)}.
  static WeightSequence dyadic(Index n);
  /// alpha_n = base^{-(n+1)}, base > 1.
  static WeightSequence geometric(double base, Index n);

  const std::vector<double>& alphas() const { return alphas_; }
  double operator[](Index n) const { return alphas_.at(static_cast<std::size_t>(n)); }
  Index size() const { return static_cast<Index>(alphas_.size()); }

 private:
  std::vector<double> alphas_;
};

struct MuMeasure {
  std::vector<double> weights;
  double total() const;
  double on(std::span<const std::size_t> subset) const;
};

/// mu({w}) = sum_n alpha_n E_w(e_n, e_n) / (1 + E_Omega(e_n, e_n)).
MuMeasure mu(const DiscretePSFM& e, const WeightSequence& alpha);

/// C_w = E_w / mu({w}), or the zero form on mu-null atoms. Throws
/// ConsistencyError if a mu-null atom carries a nonzero form.
std::vector<Form> density(const DiscretePSFM& e, const WeightSequence& alpha);
std::vector<Form> density(const DiscretePSFM& e, const MuMeasure& m);

bool is_strict(const DiscretePSFM& e, double tol = kDefaultPsdTol);

struct StrictQuotient {
  DiscretePSFM measure;  // dim = rank(E_Omega)
  Matrix projection;     // rank x N; E_X(phi, psi) = E~_X(P phi, P psi)
};

/// Quotient by the null space of E_Omega. Coordinates on the quotient are an
/// orthonormal basis of range(E_Omega); a strict input comes back unchanged
/// with the identity projection.
StrictQuotient quotient_strict(const DiscretePSFM& e, double tol = kDefaultRankTol);

/// True when E_Omega equals the identity within tol (max-abs).
bool is_normalized(const DiscretePSFM& e, double tol = kDefaultPsdTol);

}  // namespace psfm
