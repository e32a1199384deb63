#include "psfm/shifts.hpp"

#include <cmath>
#include <numbers>

namespace psfm {

ShiftWeights::ShiftWeights(long lo, long hi, std::vector<Complex> weights)
    : lo_(lo), hi_(hi), weights_(std::move(weights)) {
  if (hi_ < lo_) throw InputError("shift window must satisfy lo <= hi");
  if (static_cast<long>(weights_.size()) != hi_ - lo_)
    throw InputError("shift window [" + std::to_string(lo_) + ", " + std::to_string(hi_) +
                     "] needs " + std::to_string(hi_ - lo_) + " weights, got " +
                     std::to_string(weights_.size()));
  for (const Complex& c : weights_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw InputError("shift weights must be finite");
}

ShiftWeights ShiftWeights::symmetric(long half_width, std::vector<Complex> weights) {
  return ShiftWeights(-half_width, half_width, std::move(weights));
}

ShiftWeights ShiftWeights::constant(long lo, long hi, Complex value) {
  return ShiftWeights(lo, hi, std::vector<Complex>(static_cast<std::size_t>(hi - lo), value));
}

Complex ShiftWeights::weight(long l) const {
  if (l < lo_ || l >= hi_) throw InputError("shift weight index outside window");
  return weights_[static_cast<std::size_t>(l - lo_)];
}

MomentMatrix::MomentMatrix(const ShiftWeights& w) : lo_(w.lo()) {
  const Index n = w.size();
  entries_ = Matrix::Identity(n, n);
  for (Index m = 0; m < n; ++m) {
    Complex prod = 1.0;
    for (Index k = m + 1; k < n; ++k) {
      prod *= w.weights()[static_cast<std::size_t>(k - 1)];
      entries_(m, k) = prod;
      entries_(k, m) = std::conj(prod);
    }
  }
}

double MinorComparison::defect() const {
  return std::abs(determinant - product_formula) / std::max(1.0, std::abs(product_formula));
}

MinorComparison principal_minor(const MomentMatrix& m, const std::vector<long>& indices) {
  const Index s = static_cast<Index>(indices.size());
  const Index size = m.matrix().rows();
  for (Index a = 0; a < s; ++a) {
    const long k = indices[static_cast<std::size_t>(a)];
    if (k < m.lo() || k - m.lo() >= size)
      throw InputError("principal_minor: index " + std::to_string(k) + " outside window");
    if (a > 0 && indices[static_cast<std::size_t>(a - 1)] >= k)
      throw InputError("principal_minor: indices must be strictly increasing");
  }
  Matrix sub(s, s);
  for (Index a = 0; a < s; ++a)
    for (Index b = 0; b < s; ++b)
      sub(a, b) = m.at(indices[static_cast<std::size_t>(a)], indices[static_cast<std::size_t>(b)]);

  MinorComparison out;
  out.determinant = s == 0 ? Complex(1.0) : sub.partialPivLu().determinant();
  out.product_formula = 1.0;
  for (Index a = 0; a + 1 < s; ++a)
    out.product_formula *= 1.0 - std::norm(m.at(indices[static_cast<std::size_t>(a)],
                                                 indices[static_cast<std::size_t>(a + 1)]));
  return out;
}

const char* to_string(ShiftClass c) {
  switch (c) {
    case ShiftClass::NotPositive: return "NotPositive";
    case ShiftClass::Semispectral: return "Semispectral";
    case ShiftClass::Spectral: return "Spectral";
  }
  return "?";
}

ShiftClass classify(const ShiftWeights& w, double unit_tol) {
  bool all_unit = true;
  for (const Complex& c : w.weights()) {
    const double a = std::abs(c);
    if (a > 1.0 + unit_tol) return ShiftClass::NotPositive;
    if (a < 1.0 - unit_tol) all_unit = false;
  }
  return all_unit ? ShiftClass::Spectral : ShiftClass::Semispectral;
}

Complex arc_moment(long q, double t0, double t1) {
  const double two_pi = 2.0 * std::numbers::pi;
  if (q == 0) return (t1 - t0) / two_pi;
  // (e^{iqt1} - e^{iqt0}) / (2 pi i q), written via the midpoint so that equal
  // endpoints give an exact zero.
  const double qd = static_cast<double>(q);
  const double half = 0.5 * qd * (t1 - t0);
  const double phase = 0.5 * qd * (t0 + t1);
  return Complex(std::cos(phase), std::sin(phase)) * (std::sin(half) / (std::numbers::pi * qd));
}

Form arc_form(const ShiftWeights& w, double t0, double t1) {
  const double two_pi = 2.0 * std::numbers::pi;
  if (!(t0 >= 0.0 && t0 <= t1 && t1 <= two_pi))
    throw InputError("arc must satisfy 0 <= t0 <= t1 <= 2 pi");
  const MomentMatrix c(w);
  const Index n = w.size();
  Matrix out(n, n);
  for (Index m = 0; m < n; ++m)
    for (Index k = 0; k < n; ++k) out(m, k) = c.matrix()(m, k) * arc_moment(m - k, t0, t1);
  return Form(std::move(out));
}

Form moment_form(const ShiftWeights& w, long k) {
  const Index n = w.size();
  if (std::abs(k) >= n && n > 0)
    throw InputError("moment_form: |k| must be smaller than the window size");
  const MomentMatrix c(w);
  Matrix out = Matrix::Zero(n, n);
  for (Index m = 0; m < n; ++m) {
    const Index col = m + k;
    if (col >= 0 && col < n) out(m, col) = c.matrix()(m, col);
  }
  return Form(std::move(out));
}

Matrix shift_power_matrix(const ShiftWeights& w, long k) {
  const Index n = w.size();
  Matrix s = Matrix::Zero(n, n);  // <e_m|S e_j> = c_{j-1} delta_{m, j-1}
  for (Index j = 1; j < n; ++j) s(j - 1, j) = w.weights()[static_cast<std::size_t>(j - 1)];
  Matrix base = k >= 0 ? s : Matrix(s.adjoint());
  Matrix out = Matrix::Identity(n, n);
  for (long i = 0; i < std::abs(k); ++i) out = out * base;
  return out;
}

double moment_form_defect(const ShiftWeights& w, long k) {
  const Matrix a = moment_form(w, k).matrix();
  const Matrix b = shift_power_matrix(w, k);
  const Index n = w.size();
  const Index reach = static_cast<Index>(std::abs(k));
  double worst = 0.0;
  for (Index m = reach; m + reach < n; ++m)
    worst = std::max(worst, max_abs(Matrix(a.row(m) - b.row(m))));
  return worst;
}

}  // namespace psfm
