#pragma once

#include "psfm/spectral.hpp"

#include <cstdint>
#include <optional>

namespace psfm {

/// num * 2^{-exp}, kept with an odd numerator (or zero).
struct Dyadic {
  std::uint64_t num = 0;
  int exp = 0;

  double value() const;
  friend bool operator==(const Dyadic&, const Dyadic&) = default;
};

/// Positive integers a_0, a_1, ... and the derived sigma_i, phi(j), b_j.
/// Values past 2^63 saturate in `a`; powers of two keep their exact exponent.
class GrowthSequence {
 public:
  /// a_i = first * ratio^i.
  static GrowthSequence geometric(std::uint64_t first, std::uint64_t ratio);
  static GrowthSequence list(std::vector<std::uint64_t> a);
  /// "geom:FIRST,RATIO" or "list:a0,a1,...".
  static GrowthSequence parse(const std::string& spec);

  std::uint64_t a(Index i) const;           // saturating
  double a_real(Index i) const;             // may be inf
  std::optional<int> log2_a(Index i) const; // when a_i is a power of two
  /// Known length of an explicit list; nullopt for generated sequences.
  std::optional<Index> length() const;
  /// sum_i 2/a_i: closed form for geometric, finite sum for a list, nullopt
  /// when the series diverges.
  std::optional<double> square_sum_bound() const;
  std::string describe() const;

 private:
  bool geometric_ = true;
  std::uint64_t first_ = 8;
  std::uint64_t ratio_ = 2;
  std::vector<std::uint64_t> list_;
};

class CounterexampleMatrix {
 public:
  struct Entry {
    Index col;
    double value;
  };

  CounterexampleMatrix(GrowthSequence a, Index size);

  Index size() const { return size_; }
  const GrowthSequence& growth() const { return a_; }
  std::span<const Entry> row(Index i) const { return rows_.at(static_cast<std::size_t>(i)); }
  double at(Index i, Index j) const;

  /// sigma_i, saturating.
  std::uint64_t sigma(Index i) const;
  /// phi(j) for j >= 1.
  Index parent(Index j) const { return parent_.at(static_cast<std::size_t>(j)); }
  double b(Index j) const { return b_.at(static_cast<std::size_t>(j)); }
  /// Exact b_j when every a_k on the ancestry chain is a power of two and the
  /// numerators stay within 64 bits.
  const std::optional<Dyadic>& b_exact(Index j) const { return b_exact_.at(static_cast<std::size_t>(j)); }
  /// Forward error bound on the double b_j.
  double b_error(Index j) const { return b_error_.at(static_cast<std::size_t>(j)); }

  /// Rows i with sigma_i < K: their whole support lies in the section.
  const std::vector<Index>& complete_rows() const { return complete_; }
  std::optional<double> square_sum_bound() const { return a_.square_sum_bound(); }

  Eigen::MatrixXd dense(Index k) const;  // leading k x k section
  RowFiniteOperator to_operator() const;
  /// Test hook: overwrite one stored entry (i, j).
  void set_entry(Index i, Index j, double value);

 private:
  GrowthSequence a_;
  Index size_;
  std::vector<std::vector<Entry>> rows_;
  std::vector<Index> parent_;
  std::vector<double> b_;
  std::vector<std::optional<Dyadic>> b_exact_;
  std::vector<double> b_error_;
  std::vector<Index> complete_;
  std::vector<std::uint64_t> sigma_;
};

CounterexampleMatrix build(const GrowthSequence& a, Index size);

struct CounterexampleReport {
  bool symmetric = false;
  bool zero_diagonal = false;
  bool entries_in_unit_interval = false;
  bool finite_support = false;
  bool unit_row_sums = false;
  std::optional<bool> row_sums_exact;  // dyadic check, when available
  bool square_sum_below_one = false;
  bool square_sum_monotone = false;
  bool square_sum_identity = false;
  bool bound_below_one = false;        // analytic sum 2/a_i < 1
  bool within_bound = false;           // partial sum <= analytic bound

  double max_asymmetry = 0.0;
  double max_row_sum_defect = 0.0;
  double partial_square_sum = 0.0;
  std::optional<double> analytic_bound;
  double square_sum_identity_defect = 0.0;
  double max_b_error = 0.0;
  Index complete_rows = 0;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;

  /// The four structural properties plus the square-sum checks; a missing or
  /// divergent analytic bound is reported but is not itself a failure.
  bool passed() const { return failures.empty(); }
};

CounterexampleReport verify_properties(const CounterexampleMatrix& m);

struct SectionSpectrum {
  Index size = 0;
  Eigen::VectorXd eigenvalues;  // ascending
  double max_abs = 0.0;
  double frobenius = 0.0;       // sqrt of the section's square sum
  bool within_hs_bound = false;
};

/// Eigenvalues of the leading k x k section; k <= m.size().
SectionSpectrum truncated_spectrum(const CounterexampleMatrix& m, Index k);

struct SpectrumSweep {
  std::vector<SectionSpectrum> sections;
  bool monotone = false;  // max|lambda| nondecreasing in k
};

SpectrumSweep spectrum_sweep(const CounterexampleMatrix& m, const std::vector<Index>& sizes);

struct EigencheckReport {
  std::vector<Index> rows;             // complete rows checked
  Vector coordinates;                  // (T~ e)_i
  Vector adjoint_coordinates;          // (T*~ e)_i
  double max_defect = 0.0;
  bool exact = false;                  // every coordinate == 1.0
  bool passed = false;                 // max_defect <= tol
  std::vector<Index> excluded_rows;    // incomplete rows
};

/// T~ and T*~ applied to |e> = (1, 1, ...) on the complete rows.
EigencheckReport eigencheck_e(const CounterexampleMatrix& m, double tol = 1e-14);

}  // namespace psfm
