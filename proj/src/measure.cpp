#include "psfm/measure.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace psfm {

DiscretePSFM::DiscretePSFM(Index dim, std::vector<Atom> atoms, bool validate,
                           double tol)
    : dim_(dim), atoms_(std::move(atoms)) {
  if (dim_ < 0) throw InputError("PSFM dimension must be nonnegative");
  for (const Atom& a : atoms_) {
    if (a.form.dim() != dim_)
      throw InputError("atom '" + a.label + "' has dimension " +
                       std::to_string(a.form.dim()) + ", expected " +
                       std::to_string(dim_));
    if (validate) {
      const PositivityReport r = is_positive(a.form, tol);
      if (!r.positive) {
        std::ostringstream os;
        os << "atom '" << a.label << "' is not positive (min eigenvalue "
           << r.min_eigenvalue << ", hermiticity defect "
           << r.hermiticity_defect << ")";
        throw InputError(os.str());
      }
    }
  }
}

Form DiscretePSFM::on(std::span<const std::size_t> subset) const {
  Form out = Form::zero(dim_);
  for (std::size_t i : subset) out += atoms_.at(i).form;
  return out;
}

Form DiscretePSFM::total() const {
  Form out = Form::zero(dim_);
  for (const Atom& a : atoms_) out += a.form;
  return out;
}

WeightSequence::WeightSequence(std::vector<double> alphas)
    : alphas_(std::move(alphas)) {
  for (double a : alphas_)
    if (!(a > 0.0) || !std::isfinite(a))
      throw InputError("weight sequence entries must be positive and finite");
}

WeightSequence WeightSequence::dyadic(Index n) { return geometric(2.0, n); }

WeightSequence WeightSequence::geometric(double base, Index n) {
  if (!(base > 1.0)) throw InputError("geometric weight base must exceed 1");
  std::vector<double> a(static_cast<std::size_t>(n));
  double v = 1.0 / base;
  for (auto& x : a) {
    x = v;
    v /= base;
  }
  return WeightSequence(std::move(a));
}

double MuMeasure::total() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double MuMeasure::on(std::span<const std::size_t> subset) const {
  double s = 0.0;
  for (std::size_t i : subset) s += weights.at(i);
  return s;
}

MuMeasure mu(const DiscretePSFM& e, const WeightSequence& alpha) {
  if (alpha.size() < e.dim())
    throw InputError("weight sequence has " + std::to_string(alpha.size()) +
                     " entries, need " + std::to_string(e.dim()));
  const Matrix total = e.total().matrix();
  MuMeasure out;
  out.weights.reserve(e.size());
  for (const Atom& a : e.atoms()) {
    double w = 0.0;
    for (Index n = 0; n < e.dim(); ++n)
      w += alpha[n] * a.form(n, n).real() / (1.0 + total(n, n).real());
    out.weights.push_back(w);
  }
  return out;
}

std::vector<Form> density(const DiscretePSFM& e, const MuMeasure& m) {
  if (m.weights.size() != e.size())
    throw InputError("mu has the wrong number of atoms");
  std::vector<Form> out;
  out.reserve(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const Atom& a = e.atom(i);
    if (m.weights[i] > 0.0) {
      out.emplace_back(a.form.matrix() / m.weights[i]);
    } else {
      if (max_abs(a.form.matrix()) > 0.0)
        throw ConsistencyError("atom '" + a.label +
                               "' has mu = 0 but a nonzero form; the measure "
                               "is not absolutely continuous w.r.t. mu");
      out.push_back(Form::zero(e.dim()));
    }
  }
  return out;
}

std::vector<Form> density(const DiscretePSFM& e, const WeightSequence& alpha) {
  return density(e, mu(e, alpha));
}

bool is_strict(const DiscretePSFM& e, double tol) {
  const Matrix total = e.total().matrix();
  const Eigen::VectorXd ev = hermitian_eigenvalues(total);
  return ev.size() > 0 && ev(0) > tol * max_abs(total);
}

bool is_normalized(const DiscretePSFM& e, double tol) {
  const Matrix total = e.total().matrix();
  return max_abs(Matrix(total - Matrix::Identity(e.dim(), e.dim()))) <= tol;
}

StrictQuotient quotient_strict(const DiscretePSFM& e, double tol) {
  const Form total = e.total();
  const QuotientBasis q = orthonormalize(total, tol);
  if (q.rank == e.dim())
    return {e, Matrix::Identity(e.dim(), e.dim())};

  // M g_k spans range(E_Omega); orthonormalize it in the Euclidean product.
  const Matrix range_span = total.matrix() * q.vectors;
  const QuotientBasis euclid =
      orthonormalize(Form(range_span.adjoint() * range_span), tol);
  const Matrix u = range_span * euclid.vectors;  // N x r, u^H u = I

  std::vector<Atom> atoms;
  atoms.reserve(e.size());
  for (const Atom& a : e.atoms())
    atoms.push_back({a.label, Form(u.adjoint() * a.form.matrix() * u)});
  return {DiscretePSFM(u.cols(), std::move(atoms), false), u.adjoint()};
}

}  // namespace psfm
