#pragma once

#include "psfm/forms.hpp"

#include <vector>

namespace psfm {

/// Weighted shift S e_n = c_{n-1} e_{n-1}, truncated to the index window
/// [lo, hi]. Weights are stored for l in [lo, hi - 1].
class ShiftWeights {
 public:
  ShiftWeights(long lo, long hi, std::vector<Complex> weights);

  /// Window [-half_width, half_width] with 2 * half_width weights.
  static ShiftWeights symmetric(long half_width, std::vector<Complex> weights);
  static ShiftWeights constant(long lo, long hi, Complex value);

  long lo() const { return lo_; }
  long hi() const { return hi_; }
  Index size() const { return static_cast<Index>(hi_ - lo_ + 1); }
  Complex weight(long l) const;
  const std::vector<Complex>& weights() const { return weights_; }
  bool contains(long n) const { return n >= lo_ && n <= hi_; }
  Index offset(long n) const { return static_cast<Index>(n - lo_); }

 private:
  long lo_;
  long hi_;
  std::vector<Complex> weights_;
};

/// (c_mn) on the window: c_mm = 1, c_mn = prod_{l=m}^{n-1} c_l for m < n,
/// c_nm = conj(c_mn).
class MomentMatrix {
 public:
  explicit MomentMatrix(const ShiftWeights& w);

  long lo() const { return lo_; }
  const Matrix& matrix() const { return entries_; }
  Complex at(long m, long n) const {
    return entries_(static_cast<Index>(m - lo_), static_cast<Index>(n - lo_));
  }

 private:
  long lo_;
  Matrix entries_;
};

inline MomentMatrix moment_matrix(const ShiftWeights& w) { return MomentMatrix(w); }

struct MinorComparison {
  Complex determinant;
  double product_formula = 0.0;  // prod_l (1 - |c_{k_l k_{l+1}}|^2)
  double defect() const;         // |det - formula| / max(1, |formula|)
};

/// Principal minor on window indices k_1 < ... < k_s.
MinorComparison principal_minor(const MomentMatrix& m, const std::vector<long>& indices);

enum class ShiftClass { NotPositive, Semispectral, Spectral };

const char* to_string(ShiftClass c);

/// |c_l| = 1 for all l: Spectral; all |c_l| <= 1: Semispectral; else NotPositive.
ShiftClass classify(const ShiftWeights& w, double unit_tol = 1e-12);

/// (1/2pi) int_{t0}^{t1} e^{iqt} dt in closed form.
Complex arc_moment(long q, double t0, double t1);

/// E_S([t0, t1)) on the window: entries c_mn * I_{m-n}([t0, t1)).
Form arc_form(const ShiftWeights& w, double t0, double t1);

/// k-th moment form: entries c_mn where k + m - n = 0, zero elsewhere.
Form moment_form(const ShiftWeights& w, long k);

/// Truncated matrix of S^k (k > 0), (S^*)^{-k} (k < 0) or I on the window.
Matrix shift_power_matrix(const ShiftWeights& w, long k);

/// Max |moment_form - shift power| over interior rows, where the shift chain
/// from row m stays inside the window.
double moment_form_defect(const ShiftWeights& w, long k);

}  // namespace psfm
