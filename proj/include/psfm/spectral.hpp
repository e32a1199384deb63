#pragma once

#include "psfm/pointwise.hpp"

#include <map>
#include <optional>

namespace psfm {

/// Row- and column-finite matrix over integer indices, T[m][n] = <e_m|T e_n>.
/// Only stored rows are nonzero.
class RowFiniteOperator {
 public:
  struct Entry {
    long col;
    Complex value;
  };

  static RowFiniteOperator from_dense(const Matrix& m, long first_index = 0);

  void add(long row, long col, Complex value);
  std::span<const Entry> row(long r) const;
  const std::map<long, std::vector<Entry>>& rows() const { return rows_; }
  RowFiniteOperator adjoint() const;
  /// Dense section on indices [first, first + size).
  Matrix section(long first, Index size) const;

 private:
  std::map<long, std::vector<Entry>> rows_;
};

/// Coefficient sequence (d_n) on the index window [first, first + size):
/// the functional |d> with <psi|d> = sum conj(b_n) d_n.
struct CoefficientSequence {
  long first = 0;
  Vector values;

  long last() const { return first + static_cast<long>(values.size()) - 1; }
  bool contains(long n) const { return n >= first && n <= last(); }
  Complex at(long n) const { return values(static_cast<Index>(n - first)); }
};

/// Rows of T whose support lies inside d's window.
std::vector<long> supported_rows(const RowFiniteOperator& t, const CoefficientSequence& d);

/// (T~ d)_n = sum_j T[n][j] d_j for each requested row n. Throws InputError
/// when a row reaches outside d's window.
Vector tilde_apply(const RowFiniteOperator& t, const CoefficientSequence& d,
                   std::span<const long> rows);

/// Same, on every row of d's window.
CoefficientSequence tilde_apply(const RowFiniteOperator& t, const CoefficientSequence& d);

/// Unweighted shift S e_n = e_{n-1} restricted to rows [lo, hi]; row n holds
/// the single entry (n, n+1).
RowFiniteOperator unit_shift(long lo, long hi);

struct ShiftEigenvector {
  CoefficientSequence d;            // d_j = lambda^j on [-J, J]
  double residual = 0.0;            // interior max |(S~d)_n - lambda d_n| / max|d|
  double adjoint_residual = 0.0;    // interior max |(S*~d)_n - conj(lambda) d_n| / max|d|
  bool simultaneous = false;        // also an adjoint eigenvector
};

/// Generalized eigenvector of the unweighted shift for lambda on [-J, J];
/// nullopt for lambda = 0, where only d = 0 solves the recurrence.
std::optional<ShiftEigenvector> shift_eigensolve(Complex lambda, long half_width,
                                                 double tol = 1e-12);

struct SpectralPoint {
  Complex lambda;
  Index multiplicity = 0;  // n(lambda)
  double mu = 0.0;
  Matrix d_rows;           // n x N, entry (k, n) = <d_k(lambda)|e_n>
};

struct GeneralizedEigensystem {
  std::vector<SpectralPoint> points;
  double normality_defect = 0.0;
  double expansion_residual = 0.0;   // <e_a|T e_b> vs sum lambda <e_a|d><d|e_b> mu
  double identity_residual = 0.0;    // <e_a|e_b> vs sum <e_a|d><d|e_b> mu
  double eigen_residual = 0.0;       // (T~ d - lambda d), relative to |d|
  double adjoint_residual = 0.0;     // (T*~ d - conj(lambda) d), relative to |d|
  double size_bound = 0.0;           // max sum_n |<d_k|e_n>|^2 beta_n
  bool passed = false;
};

/// Generalized eigenvector expansion of a finite normal matrix: Schur
/// eigenvectors clustered at relative gap `cluster_tol * |T|_F` give spectral
/// projection atoms, which run through the measure/pointwise pipeline.
GeneralizedEigensystem spectral_expand(const Matrix& t, const WeightSequence& alpha,
                                       double tol = 1e-9, double cluster_tol = 1e-8,
                                       double normality_tol = 1e-10);

/// Spectral projections of a normal matrix at its clustered eigenvalues.
struct SpectralProjections {
  std::vector<Complex> points;
  std::vector<Matrix> projections;
  double normality_defect = 0.0;
};

SpectralProjections spectral_projections(const Matrix& t, double cluster_tol = 1e-8,
                                         double normality_tol = 1e-10);

struct HaarArc {
  long begin;  // grid index, inclusive
  long end;    // grid index, exclusive
};

struct HaarReport {
  long half_width = 0;
  long grid = 0;
  double fourier_defect = 0.0;         // max |(1/M) sum lambda^q - delta_q0|, |q| <= 2J
  double full_circle_defect = 0.0;     // grid reconstruction vs identity
  double arc_form_full_defect = 0.0;   // grid reconstruction vs closed-form full circle
  double arc_error = 0.0;              // grid arcs vs closed-form arc integrals
  double arc_error_bound = 0.0;        // (t1 - t0) |q| / (2M), maximized
  bool passed = false;
};

/// Uniform weights 1/M at lambda_j = e^{2 pi i j / M} with d(lambda) = (lambda^n).
/// Throws InputError when M <= 2J (aliasing).
HaarReport haar_recovery(long half_width, long grid, std::span<const HaarArc> arcs = {},
                         double tol = 1e-14);

}  // namespace psfm
