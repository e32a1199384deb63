#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace psfm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;
using Index = Eigen::Index;

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kDefaultPsdTol = 1e-10;
inline constexpr double kDefaultVerifyTol = 1e-10;

// Malformed or dimensionally inconsistent input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was called outside its documented precondition.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Internal identities that must hold by construction were violated.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// Largest real diagonal entry, clamped at zero.
inline double max_diagonal(const Matrix& m) {
  double best = 0.0;
  for (Index i = 0; i < m.rows(); ++i) best = std::max(best, m(i, i).real());
  return best;
}

// Count of Hermitian-part eigenvalues strictly above `threshold`.
Index eigen_rank(const Matrix& hermitian, double threshold);

// Eigenvalues of (m + m^H)/2, ascending.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& m);

}  // namespace psfm
