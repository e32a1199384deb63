#pragma once

#include "psfm/common.hpp"

#include <functional>

namespace psfm {

/// Sesquilinear form on span(e_0..e_{N-1}), stored as M[m][n] = Phi(e_m, e_n).
/// Antilinear in the first slot: Phi(a, b) = a^H M b.
class Form {
 public:
  Form() = default;
  explicit Form(Matrix entries);

  static Form zero(Index dim);
  static Form identity(Index dim);

  Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  Complex operator()(Index m, Index n) const { return entries_(m, n); }

  Form operator+(const Form& other) const;
  Form& operator+=(const Form& other);
  Form operator*(double s) const { return Form(entries_ * s); }

 private:
  Matrix entries_;
};

Complex evaluate(const Form& form, const Vector& phi, const Vector& psi);

using QuadraticMap = std::function<Complex(const Vector&)>;

/// Recovers the form from its values on the diagonal phi -> Phi(phi, phi).
/// Uses Phi(x, y) = 1/4 sum_k i^{-k} Phi(x + i^k y, x + i^k y), the
/// arrangement that matches antilinearity in the first slot.
Form polarize(const QuadraticMap& diag, Index dim);

struct PositivityReport {
  bool positive = false;
  double min_eigenvalue = 0.0;
  double hermiticity_defect = 0.0;
  double scale = 0.0;  // max-abs entry of M
};

PositivityReport is_positive(const Form& form, double tol = kDefaultPsdTol);

/// Orthonormal basis of V / N for a positive form.
///
/// `vectors` holds the Gram-Schmidt survivors g_k as coefficient columns and
/// `functionals` the rows l_k = g_k^H M, so l_k . phi = Phi(g_k, phi).
/// `source_index[k]` is the basis index n_k whose step produced g_k.
struct QuotientBasis {
  Index rank = 0;
  Matrix vectors;      // N x rank
  Matrix functionals;  // rank x N
  std::vector<Index> source_index;
  // Smallest accepted and largest rejected squared residual, relative to the
  // rank threshold scale. Borderline ranks show up as values close to 1.
  double smallest_kept = 0.0;
  double largest_dropped = 0.0;
};

/// Gram-Schmidt on (e_n) in the form's semi-inner product. A residual is
/// treated as null when Phi(v, v) <= tol * max_n Phi(e_n, e_n). Classical
/// projection with one re-orthogonalization pass.
QuotientBasis orthonormalize(const Form& form, double tol = kDefaultRankTol,
                             double psd_tol = kDefaultPsdTol);

}  // namespace psfm
