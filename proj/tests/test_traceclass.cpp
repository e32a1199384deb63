#include "psfm/traceclass.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace psfm;

namespace {

Matrix diag(std::initializer_list<double> d) {
  Matrix m = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) m(i, i) = x, ++i;
  return m;
}

}  // namespace

TEST_CASE("lambda_operator examples") {
  const WeightSequence alpha({0.5, 0.25});
  const LambdaOperator a = lambda_operator(DiscretePSFM(2, {{"i", Form::identity(2)}}), alpha);
  CHECK(a.betas == std::vector<double>{0.25, 0.125});
  const LambdaOperator b = lambda_operator(DiscretePSFM(2, {{"z", Form::zero(2)}}), alpha);
  CHECK(b.betas == std::vector<double>{0.5, 0.25});
  const LambdaOperator c = lambda_operator(DiscretePSFM(1, {{"t", Form(diag({3.0}))}}), WeightSequence({0.5}));
  CHECK(c.betas == std::vector<double>{0.125});
}

TEST_CASE("h_gamma_norm examples") {
  const LambdaOperator l{{0.25, 0.125}};
  const Vector phi = Vector::Ones(2);
  CHECK(h_gamma_norm(phi, l, 0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(h_gamma_norm(phi, l, 1.0) == doctest::Approx(std::sqrt(12.0)));
  CHECK(h_gamma_norm(phi, l, -1.0) == doctest::Approx(std::sqrt(0.375)));
  CHECK_THROWS_AS(h_gamma_norm(Vector::Ones(3), l, 0.0), InputError);
}

TEST_CASE("density_operators examples") {
  SUBCASE("single identity atom has trace one") {
    const DiscretePSFM e(2, {{"i", Form::identity(2)}});
    const WeightSequence alpha({0.5, 0.25});
    const auto ops = density_operators(decompose(e, alpha), lambda_operator(e, alpha));
    CHECK(ops[0].trace == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ops[0].rank == 2);
  }
  SUBCASE("h-vectors are linearly independent") {
    gen::Rng rng(51);
    const DiscretePSFM e = gen::psfm_measure(rng, 4, 3, 0.0);
    const WeightSequence alpha = WeightSequence::dyadic(4);
    const PointwiseDecomposition p = decompose(e, alpha);
    const auto ops = density_operators(p, lambda_operator(e, alpha));
    for (std::size_t w = 0; w < e.size(); ++w) {
      const Matrix gram = ops[w].h_vectors.adjoint() * ops[w].h_vectors;
      const auto ev = oracle::hermitian_eigenvalues(gram);
      CHECK(ev.front() > 1e-12 * ev.back());
      CHECK(ops[w].h_vectors.cols() == p.atoms[w].rank);
    }
  }
  SUBCASE("zero atom") {
    const DiscretePSFM e(2, {{"i", Form::identity(2)}, {"z", Form::zero(2)}});
    const WeightSequence alpha = WeightSequence::dyadic(2);
    const auto ops = density_operators(decompose(e, alpha), lambda_operator(e, alpha));
    CHECK(ops[1].h_vectors.cols() == 0);
    CHECK(max_abs(ops[1].t) == 0.0);
    CHECK(ops[1].rank == 0);
  }
  SUBCASE("mismatched Lambda is reported against the atom") {
    const DiscretePSFM e(2, {{"only", Form::identity(2)}});
    const PointwiseDecomposition p = decompose(e, WeightSequence::dyadic(2));
    try {
      density_operators(p, lambda_operator(e, WeightSequence::geometric(5.0, 2)));
      FAIL("expected a trace defect");
    } catch (const ConsistencyError& err) {
      CHECK(std::string(err.what()).find("only") != std::string::npos);
    }
  }
}

TEST_CASE("pom route examples") {
  SUBCASE("coin: both routes give [1]") {
    const DiscretePSFM e(1, {{"h", Form(diag({0.25}))}, {"t", Form(diag({0.75}))}});
    const WeightSequence alpha = WeightSequence::dyadic(1);
    const auto ses = density_operators(decompose(e, alpha), lambda_operator(e, alpha));
    const auto pom = pom_density_route(e, alpha);
    for (std::size_t w = 0; w < 2; ++w) {
      CHECK(ses[w].t(0, 0).real() == doctest::Approx(1.0));
      CHECK(pom[w].t(0, 0).real() == doctest::Approx(1.0));
    }
  }
  SUBCASE("random semispectral N=4, M=5") {
    gen::Rng rng(52);
    const DiscretePSFM e = gen::semispectral_measure(rng, 4, 5);
    const WeightSequence alpha = WeightSequence::dyadic(4);
    const PointwiseDecomposition p = decompose(e, alpha);
    const LambdaOperator l = lambda_operator(e, alpha);
    for (std::size_t k = 0; k < l.betas.size(); ++k)
      CHECK(l.betas[k] == doctest::Approx(0.5 * alpha[static_cast<Index>(k)]).epsilon(1e-12));
    const auto ses = density_operators(p, l);
    const auto pom = pom_density_route(e, alpha);
    const RouteCrossCheck cc = cross_check_routes(e, alpha, p, ses, pom);
    CHECK(cc.agree);
    CHECK(cc.max_entry_difference < 1e-10);
    CHECK(cc.reconstruction_defect < 1e-10);
  }
}

TEST_CASE("property: trace-one densities on random PSFMs") {
  gen::Rng rng(53);
  for (int t = 0; t < 100; ++t) {
    const Index n = rng.integer(1, 6);
    const DiscretePSFM e = gen::psfm_measure(rng, n, rng.integer(1, 8));
    const WeightSequence alpha = WeightSequence::dyadic(n);
    const PointwiseDecomposition p = decompose(e, alpha);
    const LambdaOperator l = lambda_operator(e, alpha);
    const auto ses = density_operators(p, l);
    const auto pom = pom_density_route(e, alpha);
    const RouteCrossCheck cc = cross_check_routes(e, alpha, p, ses, pom);
    CHECK(cc.agree);
    CHECK(cc.mass_defect < 1e-10);
    CHECK(cc.total_variation <= cc.total_variation_bound * (1 + 1e-12));

    double mass = 0.0;
    for (std::size_t w = 0; w < e.size(); ++w) {
      const DensityOperator& s = ses[w];
      mass += s.trace * p.mu.weights[w];
      if (p.mu.weights[w] > 0.0) CHECK(std::abs(s.trace - 1.0) < 1e-10);
      CHECK(s.rank == p.atoms[w].rank);
      CHECK(pom[w].rank == p.atoms[w].rank);
      CHECK(s.ell2_bound <= 1.0 + 1e-12);
      CHECK(max_abs(Matrix(s.t - s.h_vectors * s.h_vectors.adjoint())) < 1e-12);
      for (Index k = 0; k < s.h_vectors.cols(); ++k) CHECK(s.h_vectors.col(k).norm() > 0.0);

      // Operator route: orthogonal h-vectors with non-increasing norms.
      const Matrix& h = pom[w].h_vectors;
      const Matrix g = h.adjoint() * h;
      for (Index a = 0; a < g.rows(); ++a)
        for (Index b = 0; b < g.cols(); ++b)
          if (a != b) CHECK(std::abs(g(a, b)) < 1e-12);
      for (Index k = 1; k < g.rows(); ++k) CHECK(g(k - 1, k - 1).real() >= g(k, k).real());

      // Eigenvalues of T against Jacobi.
      const auto ev = oracle::hermitian_eigenvalues(s.t);
      for (Index k = 0; k < n; ++k)
        CHECK(s.eigenvalues(k) == doctest::Approx(ev[static_cast<std::size_t>(n - 1 - k)]).epsilon(1e-9).scale(1.0));
    }
    CHECK(std::abs(mass - p.mu.total()) < 1e-10);
  }
}
