#include "psfm/measure.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace psfm;

namespace {

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }

DiscretePSFM coin(double p) {
  return DiscretePSFM(1, {{"heads", Form(scalar(p))}, {"tails", Form(scalar(1 - p))}});
}

}  // namespace

TEST_CASE("DiscretePSFM validation") {
  CHECK_THROWS_AS(DiscretePSFM(2, {{"a", Form::identity(3)}}), InputError);
  Matrix bad(2, 2);
  bad << 0.4, 0, 0, -0.1;
  try {
    DiscretePSFM(2, {{"ok", Form::identity(2)}, {"bad", Form(bad)}});
    FAIL("expected rejection");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad") != std::string::npos);
    CHECK(msg.find("-0.1") != std::string::npos);
  }
  CHECK_NOTHROW(DiscretePSFM(2, {{"bad", Form(bad)}}, false));
}

TEST_CASE("WeightSequence") {
  const WeightSequence d = WeightSequence::dyadic(3);
  CHECK(d[0] == 0.5);
  CHECK(d[2] == 0.125);
  CHECK(WeightSequence::geometric(3.0, 2)[1] == doctest::Approx(1.0 / 9));
  CHECK_THROWS_AS(WeightSequence({0.5, 0.0}), InputError);
  CHECK_THROWS_AS(WeightSequence({-1.0}), InputError);
}

TEST_CASE("mu examples") {
  const WeightSequence alpha({0.5, 0.25});
  const DiscretePSFM single(2, {{"all", Form::identity(2)}});
  CHECK(mu(single, alpha).total() == doctest::Approx(3.0 / 8));

  const DiscretePSFM with_zero(2, {{"all", Form::identity(2)}, {"none", Form::zero(2)}});
  CHECK(mu(with_zero, alpha).weights[1] == 0.0);

  const MuMeasure m = mu(coin(0.25), WeightSequence({0.5}));
  CHECK(m.weights[0] == doctest::Approx(1.0 / 16));
  CHECK(m.weights[1] == doctest::Approx(3.0 / 16));

  CHECK_THROWS_AS(mu(single, WeightSequence({0.5})), InputError);
}

TEST_CASE("density examples") {
  const WeightSequence alpha({0.5, 0.25});
  const DiscretePSFM single(2, {{"all", Form::identity(2)}});
  const auto c = density(single, alpha);
  CHECK(max_abs(Matrix(c[0].matrix() - Matrix::Identity(2, 2) * (8.0 / 3))) < 1e-14);

  const DiscretePSFM with_zero(2, {{"all", Form::identity(2)}, {"none", Form::zero(2)}});
  CHECK(max_abs(density(with_zero, alpha)[1].matrix()) == 0.0);

  const DiscretePSFM e = coin(0.25);
  const WeightSequence a1({0.5});
  const auto cc = density(e, a1);
  const MuMeasure m = mu(e, a1);
  CHECK(cc[0](0, 0).real() == doctest::Approx(4.0));
  CHECK(cc[1](0, 0).real() == doctest::Approx(4.0));  // 0.75 / (3/16)
  for (std::size_t w = 0; w < 2; ++w)
    CHECK(std::abs(cc[w](0, 0) * m.weights[w] - e.atom(w).form(0, 0)) < 1e-15);
}

TEST_CASE("density rejects a mu-null atom with a nonzero form") {
  Matrix off(2, 2);
  off << 0, 1, 1, 0;
  const DiscretePSFM e(2, {{"off", Form(off)}}, false);
  CHECK_THROWS_AS(density(e, WeightSequence::dyadic(2)), ConsistencyError);
}

TEST_CASE("is_strict examples") {
  CHECK(is_strict(DiscretePSFM(2, {{"i", Form::identity(2)}})));
  Matrix d(2, 2);
  d << 1, 0, 0, 0;
  CHECK_FALSE(is_strict(DiscretePSFM(2, {{"d", Form(d)}})));
  Matrix s(2, 2);
  s << 2, 1, 1, 2;
  CHECK(is_strict(DiscretePSFM(2, {{"s", Form(s)}})));
}

TEST_CASE("quotient_strict examples") {
  SUBCASE("normalized input is returned with the identity projection") {
    const DiscretePSFM e(2, {{"i", Form::identity(2)}});
    const StrictQuotient q = quotient_strict(e);
    CHECK(q.measure.dim() == 2);
    CHECK(max_abs(Matrix(q.projection - Matrix::Identity(2, 2))) == 0.0);
    CHECK(max_abs(Matrix(q.measure.atom(0).form.matrix() - Matrix::Identity(2, 2))) == 0.0);
  }
  SUBCASE("diag(1, 0)") {
    Matrix d(2, 2);
    d << 1, 0, 0, 0;
    const StrictQuotient q = quotient_strict(DiscretePSFM(2, {{"d", Form(d)}}));
    REQUIRE(q.measure.dim() == 1);
    CHECK(q.measure.atom(0).form(0, 0).real() == doctest::Approx(1.0));
  }
  SUBCASE("all-ones 2x2") {
    const StrictQuotient q = quotient_strict(DiscretePSFM(2, {{"j", Form(Matrix::Ones(2, 2))}}));
    REQUIRE(q.measure.dim() == 1);
    CHECK(q.measure.atom(0).form(0, 0).real() == doctest::Approx(2.0));
  }
}

TEST_CASE("property: quotient_strict is strict and pulls back") {
  gen::Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const Index n = rng.integer(1, 6);
    const DiscretePSFM e = gen::psfm_measure(rng, n, rng.integer(1, 4), 0.3);
    const StrictQuotient q = quotient_strict(e);
    if (q.measure.dim() > 0) CHECK(is_strict(q.measure));
    const double scale = std::max(1.0, max_abs(e.total().matrix()));
    for (std::size_t w = 0; w < e.size(); ++w) {
      const Matrix back = q.projection.adjoint() * q.measure.atom(w).form.matrix() * q.projection;
      CHECK(max_abs(Matrix(back - e.atom(w).form.matrix())) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("property: mu-null atoms are exactly the zero atoms, for any alpha") {
  gen::Rng rng(22);
  for (int t = 0; t < 100; ++t) {
    const Index n = rng.integer(1, 6);
    const DiscretePSFM e = gen::psfm_measure(rng, n, rng.integer(1, 6), 0.3);
    const MuMeasure m1 = mu(e, WeightSequence::dyadic(n));
    const MuMeasure m2 = mu(e, WeightSequence::geometric(3.0, n));
    for (std::size_t w = 0; w < e.size(); ++w) {
      const bool zero = max_abs(e.atom(w).form.matrix()) <= 1e-14;
      CHECK((m1.weights[w] == 0.0) == zero);
      CHECK((m2.weights[w] == 0.0) == zero);
      CHECK(m1.weights[w] >= 0.0);
    }
  }
}

TEST_CASE("property: densities reconstruct E_X on every subset") {
  gen::Rng rng(23);
  for (int t = 0; t < 40; ++t) {
    const Index n = rng.integer(1, 5);
    const std::size_t m = static_cast<std::size_t>(rng.integer(1, 8));
    const DiscretePSFM e = gen::psfm_measure(rng, n, static_cast<Index>(m));
    const WeightSequence alpha = WeightSequence::dyadic(n);
    const auto c = density(e, alpha);
    const MuMeasure mm = mu(e, alpha);
    const double scale = max_abs(e.total().matrix());
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      std::vector<std::size_t> x;
      Matrix sum = Matrix::Zero(n, n);
      for (std::size_t w = 0; w < m; ++w)
        if (mask & (1u << w)) {
          x.push_back(w);
          sum += c[w].matrix() * mm.weights[w];
        }
      CHECK(max_abs(Matrix(sum - e.on(x).matrix())) <= 1e-12 * std::max(scale, 1e-300));
      CHECK(mm.on(x) <= mm.total() + 1e-15);
    }
  }
}

TEST_CASE("property: additivity over disjoint subsets") {
  gen::Rng rng(24);
  for (int t = 0; t < 100; ++t) {
    const Index n = rng.integer(1, 5);
    const DiscretePSFM e = gen::psfm_measure(rng, n, rng.integer(2, 8));
    std::vector<std::size_t> x, y, xy;
    for (std::size_t w = 0; w < e.size(); ++w) {
      const auto pick = rng.integer(0, 2);
      if (pick == 0) x.push_back(w);
      if (pick == 1) y.push_back(w);
      if (pick != 2) xy.push_back(w);
    }
    const Matrix lhs = e.on(xy).matrix();
    const Matrix rhs = e.on(x).matrix() + e.on(y).matrix();
    CHECK(max_abs(Matrix(lhs - rhs)) <= 1e-15 * std::max(1.0, max_abs(lhs)) * static_cast<double>(e.size()));
  }
}

TEST_CASE("is_normalized") {
  CHECK(is_normalized(DiscretePSFM(2, {{"i", Form::identity(2)}})));
  CHECK_FALSE(is_normalized(DiscretePSFM(1, {{"h", Form(scalar(0.25))}})));
  CHECK(is_normalized(coin(0.25)));
}
