#include "psfm/forms.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace psfm {

Index eigen_rank(const Matrix& hermitian, double threshold) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(hermitian);
  Index count = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > threshold) ++count;
  return count;
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  const Matrix sym = (m + m.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Form::Form(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols())
    throw InputError("form matrix must be square, got " +
                     std::to_string(entries_.rows()) + "x" +
                     std::to_string(entries_.cols()));
}

Form Form::zero(Index dim) { return Form(Matrix::Zero(dim, dim)); }

Form Form::identity(Index dim) { return Form(Matrix::Identity(dim, dim)); }

Form Form::operator+(const Form& other) const {
  Form out = *this;
  out += other;
  return out;
}

Form& Form::operator+=(const Form& other) {
  if (other.dim() != dim()) throw InputError("form dimension mismatch");
  entries_ += other.entries_;
  return *this;
}

Complex evaluate(const Form& form, const Vector& phi, const Vector& psi) {
  if (phi.size() != form.dim() || psi.size() != form.dim())
    throw InputError("evaluate: vectors must have length " +
                     std::to_string(form.dim()));
  return phi.dot(form.matrix() * psi);  // dot() conjugates its left operand
}

Form polarize(const QuadraticMap& diag, Index dim) {
  static const Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Matrix out(dim, dim);
  for (Index m = 0; m < dim; ++m) {
    for (Index n = 0; n < dim; ++n) {
      Complex acc = 0;
      for (int k = 0; k < 4; ++k) {
        Vector v = Vector::Zero(dim);
        v(m) += 1.0;
        v(n) += kPowers[k];
        acc += std::conj(kPowers[k]) * diag(v);
      }
      out(m, n) = 0.25 * acc;
    }
  }
  return Form(std::move(out));
}

PositivityReport is_positive(const Form& form, double tol) {
  PositivityReport r;
  const Matrix& m = form.matrix();
  r.scale = max_abs(m);
  r.hermiticity_defect = max_abs(Matrix(m - m.adjoint()));
  const Eigen::VectorXd ev = hermitian_eigenvalues(m);
  r.min_eigenvalue = ev.size() ? ev(0) : 0.0;
  r.positive = r.hermiticity_defect <= tol * r.scale &&
               r.min_eigenvalue >= -tol * r.scale;
  return r;
}

QuotientBasis orthonormalize(const Form& form, double tol, double psd_tol) {
  const PositivityReport pos = is_positive(form, psd_tol);
  if (!pos.positive)
    throw PreconditionError(
        "orthonormalize: form is not positive (min eigenvalue " +
        std::to_string(pos.min_eigenvalue) + ", hermiticity defect " +
        std::to_string(pos.hermiticity_defect) + ")");

  const Matrix& m = form.matrix();
  const Index n = form.dim();
  const double threshold = tol * max_diagonal(m);

  QuotientBasis q;
  q.smallest_kept = std::numeric_limits<double>::infinity();
  std::vector<Vector> survivors;
  std::vector<Vector> images;  // M g_k, cached for the projections
  for (Index j = 0; j < n; ++j) {
    Vector v = Vector::Zero(n);
    v(j) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      Vector coeffs(static_cast<Index>(survivors.size()));
      for (std::size_t k = 0; k < survivors.size(); ++k)
        coeffs(static_cast<Index>(k)) = images[k].dot(v);  // Phi(g_k, v)
      for (std::size_t k = 0; k < survivors.size(); ++k)
        v -= coeffs(static_cast<Index>(k)) * survivors[k];
    }
    const Vector mv = m * v;
    const double norm2 = v.dot(mv).real();
    if (threshold > 0.0 && norm2 > threshold) {
      const double s = 1.0 / std::sqrt(norm2);
      survivors.push_back(v * s);
      images.push_back(mv * s);
      q.source_index.push_back(j);
      q.smallest_kept = std::min(q.smallest_kept, norm2 / threshold);
    } else if (threshold > 0.0) {
      q.largest_dropped = std::max(q.largest_dropped, norm2 / threshold);
    }
  }

  q.rank = static_cast<Index>(survivors.size());
  q.vectors.resize(n, q.rank);
  q.functionals.resize(q.rank, n);
  for (Index k = 0; k < q.rank; ++k) {
    q.vectors.col(k) = survivors[static_cast<std::size_t>(k)];
    q.functionals.row(k) = images[static_cast<std::size_t>(k)].adjoint();
  }
  if (q.rank == 0) q.smallest_kept = 0.0;
  return q;
}

}  // namespace psfm
