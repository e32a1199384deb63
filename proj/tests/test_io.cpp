#include "psfm/io.hpp"
#include "support/generators.hpp"

#include <doctest.h>

using namespace psfm;
using io::Json;

namespace {

std::string error_of(auto&& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("matrix JSON round trip is exact") {
  gen::Rng rng(81);
  for (int t = 0; t < 50; ++t) {
    const Index n = rng.integer(0, 5);
    const Matrix m = gen::matrix(rng, n, n);
    const Json j = io::parse_json(io::matrix_to_json(m).dump(), "round");
    CHECK(io::matrix_from_json(j) == m);
  }
}

TEST_CASE("matrix JSON accepts bare reals and reports bad paths") {
  const Matrix m = io::matrix_from_json(Json::parse(R"({"dim": 2, "entries": [[1, [0, 1]], [[0, -1], 1]]})"));
  CHECK(m(0, 0) == Complex(1.0));
  CHECK(m(0, 1) == Complex(0.0, 1.0));

  const std::string bad = error_of([] {
    io::matrix_from_json(Json::parse(R"({"dim": 2, "entries": [[1, 0], [0, "x"]]})"), "form");
  });
  CHECK(bad.find("form.entries[1][1]") != std::string::npos);
  CHECK_FALSE(error_of([] { io::matrix_from_json(Json::parse(R"({"dim": 3, "entries": [[1]]})")); }).empty());
  CHECK_FALSE(error_of([] { io::matrix_from_json(Json::parse(R"({"entries": [[1]]})")); }).empty());
}

TEST_CASE("matrix CSV") {
  const Matrix m = io::matrix_from_csv("# rotation\n0,0,-1,0\n\n1,0,0,0\n");
  CHECK(m.rows() == 2);
  CHECK(m(0, 1) == Complex(-1.0));
  CHECK(m(1, 0) == Complex(1.0));

  const std::string ragged = error_of([] { io::matrix_from_csv("1,0,0,0\n1,0\n"); });
  CHECK(ragged.find("line 2") != std::string::npos);
  const std::string junk = error_of([] { io::matrix_from_csv("1,0,abc,0\n0,0,1,0\n"); });
  CHECK(junk.find("line 1") != std::string::npos);
  CHECK(junk.find("column 5") != std::string::npos);
  CHECK(junk.find("field 3") != std::string::npos);
}

TEST_CASE("PSFM JSON round trip") {
  gen::Rng rng(82);
  const DiscretePSFM e = gen::psfm_measure(rng, 3, 4);
  const std::vector<double> alphas{0.5, 0.25, 0.125};
  const io::PsfmFile back = io::psfm_from_json(io::parse_json(io::psfm_to_json(e, alphas).dump(2), "rt"));
  REQUIRE(back.measure.size() == e.size());
  for (std::size_t w = 0; w < e.size(); ++w) {
    CHECK(back.measure.atom(w).label == e.atom(w).label);
    CHECK(back.measure.atom(w).form.matrix() == e.atom(w).form.matrix());
  }
  CHECK(back.alphas == alphas);
  CHECK_FALSE(io::psfm_from_json(io::psfm_to_json(e)).alphas);
}

TEST_CASE("PSFM JSON validation") {
  const Json bad = Json::parse(R"({"dim": 1, "atoms": [{"label": "bad", "form": {"dim": 1, "entries": [[-0.1]]}}]})");
  const std::string msg = error_of([&] { io::psfm_from_json(bad); });
  CHECK(msg.find("bad") != std::string::npos);
  CHECK_NOTHROW(io::psfm_from_json(bad, false));

  const Json unlabeled = Json::parse(R"({"dim": 1, "atoms": [{"form": {"dim": 1, "entries": [[1]]}}]})");
  CHECK(io::psfm_from_json(unlabeled).measure.atom(0).label == "atom0");
}

TEST_CASE("parse_json reports position") {
  const std::string msg = error_of([] { io::parse_json("{\n  \"dim\": 2,\n  oops\n}", "file.json"); });
  CHECK(msg.find("file.json") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("decimal keeps full precision") {
  gen::Rng rng(83);
  for (int t = 0; t < 100; ++t) {
    const double x = rng.normal() * std::pow(10.0, rng.integer(-20, 20));
    CHECK(std::stod(io::decimal(x)) == x);
  }
  CHECK(io::decimal(1.0) == "1");
}

TEST_CASE("read_text on a missing file") {
  CHECK_THROWS_AS(io::read_text("/nonexistent/psfm.json"), InputError);
}
