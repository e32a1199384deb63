#include "psfm/counterexample.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <limits>
#include <sstream>

namespace psfm {
namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();
constexpr double kUnitRoundoff = 0x1p-53;

std::uint64_t saturating_mul(std::uint64_t x, std::uint64_t y) {
  if (x != 0 && y > kSaturated / x) return kSaturated;
  return x * y;
}

std::uint64_t saturating_add(std::uint64_t x, std::uint64_t y) {
  return y > kSaturated - x ? kSaturated : x + y;
}

Dyadic normalized(std::uint64_t num, int exp) {
  if (num == 0) return {0, 0};
  const int tz = std::countr_zero(num);
  const int shift = std::min(tz, exp);
  return {num >> shift, exp - shift};
}

std::vector<std::uint64_t> parse_integers(const std::string& text, const std::string& spec) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || item.find('-') != std::string::npos)
      throw InputError("growth sequence '" + spec + "': '" + item + "' is not a positive integer");
    out.push_back(v);
  }
  return out;
}

}  // namespace

double Dyadic::value() const { return std::ldexp(static_cast<double>(num), -exp); }

GrowthSequence GrowthSequence::geometric(std::uint64_t first, std::uint64_t ratio) {
  if (first == 0 || ratio == 0) throw InputError("growth sequence needs positive first term and ratio");
  GrowthSequence g;
  g.first_ = first;
  g.ratio_ = ratio;
  return g;
}

GrowthSequence GrowthSequence::list(std::vector<std::uint64_t> a) {
  if (std::find(a.begin(), a.end(), 0u) != a.end())
    throw InputError("growth sequence entries must be positive integers");
  GrowthSequence g;
  g.geometric_ = false;
  g.list_ = std::move(a);
  return g;
}

GrowthSequence GrowthSequence::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "geom") {
    const auto v = parse_integers(rest, spec);
    if (v.size() != 2) throw InputError("growth sequence '" + spec + "': expected geom:FIRST,RATIO");
    return geometric(v[0], v[1]);
  }
  if (kind == "list") return list(parse_integers(rest, spec));
  throw InputError("growth sequence '" + spec + "': expected geom:FIRST,RATIO or list:a0,a1,...");
}

std::uint64_t GrowthSequence::a(Index i) const {
  if (!geometric_) {
    if (i < 0 || i >= static_cast<Index>(list_.size()))
      throw InputError("growth sequence index " + std::to_string(i) + " past the explicit list");
    return list_[static_cast<std::size_t>(i)];
  }
  std::uint64_t v = first_;
  if (ratio_ == 1) return v;
  for (Index k = 0; k < i && v != kSaturated; ++k) v = saturating_mul(v, ratio_);
  return v;
}

double GrowthSequence::a_real(Index i) const {
  if (!geometric_) return static_cast<double>(a(i));
  return static_cast<double>(first_) * std::pow(static_cast<double>(ratio_), static_cast<double>(i));
}

std::optional<int> GrowthSequence::log2_a(Index i) const {
  if (!geometric_) {
    const std::uint64_t v = a(i);
    if (!std::has_single_bit(v)) return std::nullopt;
    return std::countr_zero(v);
  }
  if (!std::has_single_bit(first_) || !std::has_single_bit(ratio_)) return std::nullopt;
  return std::countr_zero(first_) + static_cast<int>(i) * std::countr_zero(ratio_);
}

std::optional<Index> GrowthSequence::length() const {
  if (geometric_) return std::nullopt;
  return static_cast<Index>(list_.size());
}

std::optional<double> GrowthSequence::square_sum_bound() const {
  if (geometric_) {
    if (ratio_ == 1) return std::nullopt;
    const double r = static_cast<double>(ratio_);
    return 2.0 / static_cast<double>(first_) * r / (r - 1.0);
  }
  double s = 0.0;
  for (std::uint64_t v : list_) s += 2.0 / static_cast<double>(v);
  return s;
}

std::string GrowthSequence::describe() const {
  if (geometric_) return "geom:" + std::to_string(first_) + "," + std::to_string(ratio_);
  std::string s = "list:";
  for (std::size_t i = 0; i < list_.size(); ++i) s += (i ? "," : "") + std::to_string(list_[i]);
  return s;
}

CounterexampleMatrix::CounterexampleMatrix(GrowthSequence a, Index size)
    : a_(std::move(a)), size_(size) {
  if (size_ < 1) throw InputError("counterexample size must be at least 1");
  if (const auto len = a_.length(); len && *len < size_)
    throw InputError("explicit growth list has " + std::to_string(*len) +
                     " entries, section size " + std::to_string(size_) + " needs that many");
  const auto n = static_cast<std::size_t>(size_);

  sigma_.resize(n);
  std::uint64_t running = 0;
  for (std::size_t i = 0; i < n; ++i) sigma_[i] = running = saturating_add(running, a_.a(static_cast<Index>(i)));

  parent_.assign(n, -1);
  std::size_t i = 0;
  for (std::size_t j = 1; j < n; ++j) {
    while (sigma_[i] < j) ++i;
    parent_[j] = static_cast<Index>(i);
  }

  b_.resize(n);
  b_exact_.resize(n);
  b_error_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Index jj = static_cast<Index>(j);
    const double aj = a_.a_real(jj);
    const double parent_b = j == 0 ? 0.0 : b_[static_cast<std::size_t>(parent_[j])];
    const double parent_err = j == 0 ? 0.0 : b_error_[static_cast<std::size_t>(parent_[j])];
    b_[j] = (1.0 - parent_b) / aj;
    b_error_[j] = (parent_err + kUnitRoundoff) / aj + kUnitRoundoff * b_[j];
    if (aj >= 0x1p53) b_error_[j] += kUnitRoundoff * b_[j];

    // 1 - n/2^e = (2^e - n)/2^e, then divide by a_j = 2^la.
    const auto la = a_.log2_a(jj);
    if (!la) continue;
    std::optional<Dyadic> exact;
    if (j == 0) {
      exact = normalized(1, *la);
    } else if (const auto& pb = b_exact_[static_cast<std::size_t>(parent_[j])]; pb && pb->exp <= 63) {
      const std::uint64_t one = std::uint64_t{1} << pb->exp;
      if (pb->num <= one) exact = normalized(one - pb->num, pb->exp + *la);
    }
    if (!exact) continue;
    b_exact_[j] = exact;
    const double v = exact->value();
    if (exact->num < (std::uint64_t{1} << 53) && (v == 0.0 ? exact->num == 0 : v >= DBL_MIN)) {
      b_[j] = v;
      b_error_[j] = 0.0;
    }
  }

  rows_.resize(n);
  for (std::size_t j = 1; j < n; ++j) {
    const Index p = parent_[j];
    const double v = b_[static_cast<std::size_t>(p)];
    if (v == 0.0) continue;
    rows_[static_cast<std::size_t>(p)].push_back({static_cast<Index>(j), v});
    rows_[j].push_back({p, v});
  }

  for (std::size_t r = 0; r < n && sigma_[r] < n; ++r) complete_.push_back(static_cast<Index>(r));
}

double CounterexampleMatrix::at(Index i, Index j) const {
  for (const Entry& e : row(i))
    if (e.col == j) return e.value;
  return 0.0;
}

std::uint64_t CounterexampleMatrix::sigma(Index i) const {
  return sigma_.at(static_cast<std::size_t>(i));
}

Eigen::MatrixXd CounterexampleMatrix::dense(Index k) const {
  if (k < 0 || k > size_) throw InputError("section size outside [0, K]");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
  for (Index i = 0; i < k; ++i)
    for (const Entry& e : row(i))
      if (e.col < k) m(i, e.col) = e.value;
  return m;
}

RowFiniteOperator CounterexampleMatrix::to_operator() const {
  RowFiniteOperator op;
  for (Index i = 0; i < size_; ++i)
    for (const Entry& e : row(i)) op.add(i, e.col, e.value);
  return op;
}

void CounterexampleMatrix::set_entry(Index i, Index j, double value) {
  if (i < 0 || i >= size_ || j < 0 || j >= size_) throw InputError("set_entry: index outside section");
  auto& r = rows_[static_cast<std::size_t>(i)];
  const auto it = std::lower_bound(r.begin(), r.end(), j,
                                   [](const Entry& e, Index c) { return e.col < c; });
  if (it != r.end() && it->col == j)
    it->value = value;
  else
    r.insert(it, {j, value});
}

CounterexampleMatrix build(const GrowthSequence& a, Index size) {
  return CounterexampleMatrix(a, size);
}

CounterexampleReport verify_properties(const CounterexampleMatrix& m) {
  CounterexampleReport r;
  r.symmetric = r.zero_diagonal = r.entries_in_unit_interval = r.finite_support = true;
  const Index k = m.size();

  std::vector<double> cumulative;  // square sum of the leading (i+1) x (i+1) section
  double running = 0.0;
  for (Index i = 0; i < k; ++i) {
    const auto row = m.row(i);
    for (const auto& e : row) {
      const double d = std::abs(e.value - m.at(e.col, i));
      r.max_asymmetry = std::max(r.max_asymmetry, d);
      if (d != 0.0) r.symmetric = false;
      if (e.col == i && e.value != 0.0) r.zero_diagonal = false;
      if (!(e.value >= 0.0 && e.value <= 1.0)) r.entries_in_unit_interval = false;
      if (e.col < i) running += 2.0 * e.value * e.value;
      if (e.col == i) running += e.value * e.value;
    }
    const auto nonzeros = static_cast<std::uint64_t>(
        std::count_if(row.begin(), row.end(), [](const auto& e) { return e.value != 0.0; }));
    if (nonzeros > 0 && nonzeros - 1 > m.growth().a(i)) r.finite_support = false;
    cumulative.push_back(running);
  }
  r.partial_square_sum = running;
  r.square_sum_monotone = std::is_sorted(cumulative.begin(), cumulative.end());
  r.square_sum_below_one = r.partial_square_sum < 1.0;

  r.unit_row_sums = true;
  bool exact_available = true;
  bool exact_holds = true;
  for (Index i : m.complete_rows()) {
    double s = 0.0;
    for (const auto& e : m.row(i)) s += e.value;
    const double defect = std::abs(s - 1.0);
    r.max_row_sum_defect = std::max(r.max_row_sum_defect, defect);
    if (defect > 1e-14) r.unit_row_sums = false;
    if (s != 1.0) exact_holds = false;

    // b_{phi(i)} + a_i b_i = 1 over a common power of two.
    const auto& bi = m.b_exact(i);
    const auto la = m.growth().log2_a(i);
    const std::optional<Dyadic> bp = i == 0 ? std::optional<Dyadic>(Dyadic{0, 0}) : m.b_exact(m.parent(i));
    if (!bi || !la || !bp) {
      exact_available = false;
      continue;
    }
    const int child_exp = bi->exp - *la;  // a_i b_i = num * 2^{-child_exp}
    const int e = std::max({bp->exp, child_exp, 0});
    if (e > 63 || e - child_exp > 63 || std::bit_width(bi->num) + (e - child_exp) > 127 ||
        std::bit_width(bp->num) + (e - bp->exp) > 127) {
      exact_available = false;
      continue;
    }
    using u128 = unsigned __int128;
    const u128 total = (static_cast<u128>(bp->num) << (e - bp->exp)) +
                       (static_cast<u128>(bi->num) << (e - child_exp));
    if (total != (static_cast<u128>(1) << e)) exact_holds = false;
  }
  if (exact_available) r.row_sums_exact = exact_holds;

  // Entries of value b_i over the full support of rows 0..I number 2 a_i.
  double lhs = 0.0;
  double rhs = 0.0;
  for (Index i : m.complete_rows()) {
    for (const auto& e : m.row(i))
      if (e.col > i) lhs += 2.0 * e.value * e.value;
    rhs += 2.0 * m.growth().a_real(i) * m.b(i) * m.b(i);
  }
  r.square_sum_identity_defect = std::abs(lhs - rhs) / std::max(1.0, rhs);
  r.square_sum_identity = r.square_sum_identity_defect <= 1e-12;

  r.analytic_bound = m.square_sum_bound();
  r.bound_below_one = r.analytic_bound && *r.analytic_bound < 1.0;
  r.within_bound = !r.analytic_bound || r.partial_square_sum <= *r.analytic_bound * (1.0 + 1e-12);
  r.complete_rows = static_cast<Index>(m.complete_rows().size());
  for (Index j = 0; j < k; ++j) r.max_b_error = std::max(r.max_b_error, m.b_error(j));

  if (!r.symmetric) r.failures.push_back("symmetry");
  if (!r.zero_diagonal) r.failures.push_back("zero diagonal");
  if (!r.entries_in_unit_interval) r.failures.push_back("entries in [0,1]");
  if (!r.finite_support) r.failures.push_back("row support exceeds a_i + 1");
  if (!r.unit_row_sums) r.failures.push_back("unit row sums");
  if (r.row_sums_exact && !*r.row_sums_exact) r.failures.push_back("exact dyadic row sums");
  if (!r.square_sum_below_one) r.failures.push_back("partial square sum < 1");
  if (!r.square_sum_monotone) r.failures.push_back("square sum monotone in K");
  if (!r.square_sum_identity) r.failures.push_back("square sum identity");
  if (!r.within_bound) r.failures.push_back("partial square sum within analytic bound");
  if (!r.analytic_bound)
    r.warnings.push_back("sum 2/a_i diverges; no analytic square-sum bound");
  else if (!r.bound_below_one)
    r.warnings.push_back("sum 2/a_i = " + std::to_string(*r.analytic_bound) +
                         " is not below 1; the square-sum bound does not certify < 1");
  return r;
}

SectionSpectrum truncated_spectrum(const CounterexampleMatrix& m, Index k) {
  SectionSpectrum s;
  s.size = k;
  const Eigen::MatrixXd section = m.dense(k);
  s.frobenius = section.norm();
  if (k > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(section, Eigen::EigenvaluesOnly);
    s.eigenvalues = es.eigenvalues();
    s.max_abs = s.eigenvalues.cwiseAbs().maxCoeff();
  }
  s.within_hs_bound = s.max_abs <= s.frobenius * (1.0 + 1e-12) + 1e-15;
  return s;
}

SpectrumSweep spectrum_sweep(const CounterexampleMatrix& m, const std::vector<Index>& sizes) {
  std::vector<Index> sorted = sizes;
  std::sort(sorted.begin(), sorted.end());
  SpectrumSweep sweep;
  sweep.monotone = true;
  for (Index k : sorted) {
    sweep.sections.push_back(truncated_spectrum(m, k));
    const auto n = sweep.sections.size();
    // Interlacing: principal sections can only widen the spectrum.
    if (n > 1 && sweep.sections[n - 1].max_abs < sweep.sections[n - 2].max_abs - 1e-12)
      sweep.monotone = false;
  }
  return sweep;
}

EigencheckReport eigencheck_e(const CounterexampleMatrix& m, double tol) {
  EigencheckReport r;
  r.rows = m.complete_rows();
  for (Index i = static_cast<Index>(r.rows.size()); i < m.size(); ++i) r.excluded_rows.push_back(i);

  const CoefficientSequence e{0, Vector::Ones(m.size())};
  const RowFiniteOperator t = m.to_operator();
  std::vector<long> rows(r.rows.begin(), r.rows.end());
  r.coordinates = tilde_apply(t, e, rows);
  r.adjoint_coordinates = tilde_apply(t.adjoint(), e, rows);

  r.exact = true;
  for (Index i = 0; i < r.coordinates.size(); ++i) {
    for (const Complex c : {r.coordinates(i), r.adjoint_coordinates(i)}) {
      r.max_defect = std::max(r.max_defect, std::abs(c - 1.0));
      if (c != Complex(1.0)) r.exact = false;
    }
  }
  r.passed = r.max_defect <= tol;
  return r;
}

}  // namespace psfm
