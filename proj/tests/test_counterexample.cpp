#include "psfm/counterexample.hpp"
#include "support/oracles.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <doctest.h>

#include <map>

using namespace psfm;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace {

// Independent construction of the tree matrix on indices [0, k), in exact
// rationals, straight from the recurrence: children of i are (sigma_{i-1}, sigma_i].
struct RationalTree {
  std::vector<BigInt> a;
  std::vector<Rational> b;
  std::vector<Index> parent;
  std::map<std::pair<Index, Index>, Rational> entries;
};

RationalTree rational_tree(std::uint64_t first, Index k) {
  RationalTree t;
  t.parent.assign(static_cast<std::size_t>(k), -1);
  Index next = 1;
  for (Index i = 0; i < k; ++i) {
    const BigInt ai = BigInt(first) << static_cast<unsigned>(i);
    t.a.push_back(ai);
    const Rational up = i == 0 ? Rational(0) : t.b[static_cast<std::size_t>(t.parent[static_cast<std::size_t>(i)])];
    const Rational bi = (Rational(1) - up) / Rational(ai);
    t.b.push_back(bi);
    for (BigInt c = 0; c < ai && next < k; ++c, ++next) {
      t.parent[static_cast<std::size_t>(next)] = i;
      t.entries[{i, next}] = bi;
      t.entries[{next, i}] = bi;
    }
  }
  return t;
}

}  // namespace

TEST_CASE("GrowthSequence") {
  const GrowthSequence g = GrowthSequence::geometric(8, 2);
  CHECK(g.a(0) == 8);
  CHECK(g.a(3) == 64);
  CHECK(g.log2_a(3) == 6);
  CHECK(g.a(70) == std::numeric_limits<std::uint64_t>::max());
  CHECK(g.log2_a(70) == 73);
  CHECK(*g.square_sum_bound() == doctest::Approx(0.5));
  CHECK_FALSE(GrowthSequence::geometric(8, 1).square_sum_bound());
  CHECK(*GrowthSequence::parse("list:2,4").square_sum_bound() == doctest::Approx(1.5));
  CHECK(GrowthSequence::parse("geom:16,3").a(2) == 144);
  CHECK_THROWS_AS(GrowthSequence::parse("geom:0,2"), InputError);
  CHECK_THROWS_AS(GrowthSequence::parse("cubes"), InputError);
}

TEST_CASE("build examples") {
  const CounterexampleMatrix m = build(GrowthSequence::geometric(8, 2), 9);
  CHECK(m.b(0) == 0.125);
  REQUIRE(m.b_exact(0));
  CHECK(*m.b_exact(0) == Dyadic{1, 3});
  double sum = 0.0;
  for (const auto& e : m.row(0)) {
    CHECK(e.value == 0.125);
    sum += e.value;
  }
  CHECK(m.row(0).size() == 8);
  CHECK(sum == 1.0);
  CHECK(*m.square_sum_bound() == doctest::Approx(0.5));
  for (Index i = 0; i < 9; ++i) CHECK(m.at(i, i) == 0.0);
  CHECK(m.complete_rows() == std::vector<Index>{0});
  CHECK(m.sigma(1) == 24);
  CHECK_THROWS_AS(build(GrowthSequence::geometric(8, 2), 0), InputError);
  CHECK_THROWS_AS(build(GrowthSequence::list({8, 16}), 5), InputError);
}

TEST_CASE("construction matches the rational oracle") {
  for (const Index k : {9, 25, 100, 600}) {
    const RationalTree t = rational_tree(8, k);
    const CounterexampleMatrix m = build(GrowthSequence::geometric(8, 2), k);
    Index stored = 0;
    for (Index i = 0; i < k; ++i) {
      REQUIRE(m.b_exact(i));
      const Dyadic d = *m.b_exact(i);
      const Rational exact = Rational(d.num) / Rational(BigInt(1) << d.exp);
      CHECK(exact == t.b[static_cast<std::size_t>(i)]);
      for (const auto& e : m.row(i)) {
        ++stored;
        const auto it = t.entries.find({i, e.col});
        REQUIRE(it != t.entries.end());
        CHECK(Rational(e.value) == it->second);
      }
    }
    CHECK(static_cast<std::size_t>(stored) == t.entries.size());

    // Row sums on complete rows, and the square-sum identity, in rationals:
    // the child edges of complete rows, each counted twice, give sum 2 a_i b_i^2.
    Rational edges = 0, identity = 0;
    for (Index i : m.complete_rows()) {
      Rational sum = 0;
      for (const auto& e : m.row(i)) {
        sum += Rational(e.value);
        if (e.col > i) edges += 2 * Rational(e.value) * Rational(e.value);
      }
      CHECK(sum == 1);
      const Rational bi = t.b[static_cast<std::size_t>(i)];
      identity += 2 * Rational(t.a[static_cast<std::size_t>(i)]) * bi * bi;
    }
    CHECK(edges == identity);
  }
}

TEST_CASE("verify_properties examples") {
  SUBCASE("default sequence passes for several sizes") {
    for (const Index k : {1, 9, 25, 200, 1000}) {
      const CounterexampleReport r = verify_properties(build(GrowthSequence::geometric(8, 2), k));
      CHECK(r.passed());
      CHECK(r.symmetric);
      CHECK(r.zero_diagonal);
      CHECK(r.unit_row_sums);
      REQUIRE(r.row_sums_exact);
      CHECK(*r.row_sums_exact);
      CHECK(r.partial_square_sum < 1.0);
      CHECK(r.partial_square_sum <= 0.5 + 1e-15);
      CHECK(r.warnings.empty());
    }
  }
  SUBCASE("corrupted entry") {
    CounterexampleMatrix m = build(GrowthSequence::geometric(8, 2), 25);
    m.set_entry(0, 3, 0.25);
    const CounterexampleReport r = verify_properties(m);
    CHECK_FALSE(r.symmetric);
    CHECK_FALSE(r.passed());
    CHECK(r.max_asymmetry == doctest::Approx(0.125));
  }
  SUBCASE("a_i = 2 * 2^i: bound risk and a failing partial sum") {
    const CounterexampleReport r = verify_properties(build(GrowthSequence::geometric(2, 2), 64));
    CHECK_FALSE(r.bound_below_one);
    REQUIRE(r.analytic_bound);
    CHECK(*r.analytic_bound == doctest::Approx(2.0));
    CHECK_FALSE(r.warnings.empty());
    CHECK_FALSE(r.square_sum_below_one);
    CHECK(r.partial_square_sum >= 1.0);
    CHECK(r.unit_row_sums);
  }
  SUBCASE("non-power-of-two sequence uses tracked doubles") {
    const CounterexampleMatrix m = build(GrowthSequence::geometric(12, 3), 300);
    CHECK_FALSE(m.b_exact(0));
    const CounterexampleReport r = verify_properties(m);
    CHECK_FALSE(r.row_sums_exact);
    CHECK(r.unit_row_sums);
    CHECK(r.max_b_error < 1e-15);
    CHECK(r.passed());
  }
}

TEST_CASE("property: square sum grows with K toward the bound") {
  double previous = 0.0;
  for (Index k = 1; k <= 800; k += 37) {
    const CounterexampleReport r = verify_properties(build(GrowthSequence::geometric(8, 2), k));
    CHECK(r.partial_square_sum >= previous);
    CHECK(r.within_bound);
    CHECK(r.square_sum_identity);
    previous = r.partial_square_sum;
  }
}

TEST_CASE("truncated_spectrum examples") {
  const CounterexampleMatrix m = build(GrowthSequence::geometric(8, 2), 200);
  const SectionSpectrum one = truncated_spectrum(m, 1);
  CHECK(one.eigenvalues.size() == 1);
  CHECK(one.eigenvalues(0) == 0.0);

  const SectionSpectrum nine = truncated_spectrum(m, 9);
  CHECK(nine.max_abs < std::sqrt(0.5));
  // Star graph: eigenvalues +-sqrt(8)/8 and zeros.
  CHECK(nine.max_abs == doctest::Approx(std::sqrt(8.0) / 8).epsilon(1e-14));

  CHECK_THROWS_AS(truncated_spectrum(m, 201), InputError);
}

TEST_CASE("property: spectral radius below Frobenius norm, against Jacobi") {
  const CounterexampleMatrix m = build(GrowthSequence::geometric(8, 2), 120);
  const SpectrumSweep s = spectrum_sweep(m, {1, 2, 9, 17, 25, 40, 64, 100, 120});
  CHECK(s.monotone);
  for (const SectionSpectrum& sec : s.sections) {
    CHECK(sec.within_hs_bound);
    CHECK(sec.max_abs < 1.0);
    if (sec.size <= 40) {
      const Eigen::MatrixXd d = m.dense(sec.size);
      auto ev = oracle::jacobi_symmetric(std::vector<double>(d.data(), d.data() + d.size()),
                                         static_cast<std::size_t>(sec.size));
      std::sort(ev.begin(), ev.end());
      for (Index k = 0; k < sec.size; ++k)
        CHECK(sec.eigenvalues(k) == doctest::Approx(ev[static_cast<std::size_t>(k)]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("eigencheck_e examples") {
  const GrowthSequence g = GrowthSequence::geometric(8, 2);
  const EigencheckReport big = eigencheck_e(build(g, 25));
  CHECK(big.rows == std::vector<Index>{0, 1});
  CHECK(big.exact);
  CHECK(big.passed);
  for (Index k = 0; k < 2; ++k) {
    CHECK(big.coordinates(k) == Complex(1.0));
    CHECK(big.adjoint_coordinates(k) == Complex(1.0));
  }
  CHECK(big.excluded_rows.size() == 23);

  const EigencheckReport small = eigencheck_e(build(g, 9));
  CHECK(small.rows == std::vector<Index>{0});
  CHECK(small.coordinates(0) == Complex(1.0));
  CHECK(small.excluded_rows == std::vector<Index>{1, 2, 3, 4, 5, 6, 7, 8});
}
