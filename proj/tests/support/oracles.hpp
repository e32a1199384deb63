#pragma once

// Reference computations written independently of the library code paths.

#include "psfm/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracle {

using psfm::Complex;
using psfm::Index;
using psfm::Matrix;
using psfm::Vector;

// Cyclic Jacobi on a real symmetric matrix stored row-major.
inline std::vector<double> jacobi_symmetric(std::vector<double> a, std::size_t n) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += at(i, j) * at(i, j);
        if (i != j) off += at(i, j) * at(i, j);
      }
    if (off <= 1e-30 * std::max(total, 1e-300)) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (at(p, q) == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Eigenvalues of the Hermitian part, ascending, through the real embedding
// [[Re, -Im], [Im, Re]], which doubles every eigenvalue.
inline std::vector<double> hermitian_eigenvalues(const Matrix& m) {
  const Matrix h = (m + m.adjoint()) * 0.5;
  const auto n = static_cast<std::size_t>(h.rows());
  std::vector<double> a(4 * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex z = h(static_cast<Index>(i), static_cast<Index>(j));
      a[i * 2 * n + j] = z.real();
      a[i * 2 * n + j + n] = -z.imag();
      a[(i + n) * 2 * n + j] = z.imag();
      a[(i + n) * 2 * n + j + n] = z.real();
    }
  const std::vector<double> doubled = jacobi_symmetric(std::move(a), 2 * n);
  std::vector<double> ev;
  for (std::size_t k = 0; k < 2 * n; k += 2) ev.push_back(0.5 * (doubled[k] + doubled[k + 1]));
  return ev;
}

inline Index count_above(const std::vector<double>& ev, double threshold) {
  return static_cast<Index>(std::count_if(ev.begin(), ev.end(), [&](double x) { return x > threshold; }));
}

// Leibniz expansion; fine for n <= 8.
inline Complex leibniz_det(const Matrix& m) {
  const Index n = m.rows();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Complex total = 0.0;
  do {
    int inversions = 0;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)]) ++inversions;
    Complex term = inversions % 2 ? -1.0 : 1.0;
    for (Index i = 0; i < n; ++i) term *= m(i, perm[static_cast<std::size_t>(i)]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// sum_{m,n} conj(a_m) M[m][n] b_n written out term by term.
inline Complex sesquilinear(const Matrix& m, const Vector& a, const Vector& b) {
  Complex s = 0.0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) s += std::conj(a(i)) * m(i, j) * b(j);
  return s;
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline bool is_idempotent(const Matrix& p, double tol) { return max_abs(Matrix(p * p - p)) <= tol; }

}  // namespace oracle
