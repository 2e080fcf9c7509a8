// Generator and step-function JSON: schema validation, located error
// messages, and bit-exact emit/load round trips.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "json.hpp"
#include "qstrotter/ito_algebra.hpp"
#include "qstrotter/json_io.hpp"
#include "support.hpp"

using nlohmann::json;
using qst::numkit::CMatrix;
using qst::numkit::Complex;
using qst::numkit::CVector;
namespace ito = qst::ito;
namespace sim = qst::sim;
namespace jsonio = qst::jsonio;

namespace {

bool bit_equal(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

bool bit_equal(const ito::BlockGenerator& a, const ito::BlockGenerator& b) {
  return a.dim_h == b.dim_h && a.dim_k == b.dim_k && bit_equal(a.K, b.K) &&
         bit_equal(a.M, b.M) && bit_equal(a.L, b.L) && bit_equal(a.C, b.C);
}

}  // namespace

TEST_CASE("generator round trip is bit exact") {
  testsupport::Rng rng(421);
  for (int rep = 0; rep < 60; ++rep) {
    const int dh = 1 + static_cast<int>(3.0 * rng.uniform());
    const int dk = static_cast<int>(3.0 * rng.uniform());
    ito::BlockGenerator f;
    f.dim_h = dh;
    f.dim_k = dk;
    const Eigen::Index n = f.noise_dim();
    f.K = rng.cmatrix(dh, dh);
    f.M = rng.cmatrix(dh, n);
    f.L = rng.cmatrix(n, dh);
    f.C = rng.cmatrix(n, n);
    f.validate();

    const std::string text = jsonio::generator_to_json(f).dump(2);
    const auto back =
        jsonio::generator_from_json(jsonio::parse_text(text, "mem"));
    CHECK(bit_equal(f, back));

    // A second trip through text reproduces the text itself.
    const std::string text2 = jsonio::generator_to_json(back).dump(2);
    CHECK(text == text2);
  }
}

TEST_CASE("round trip survives awkward doubles") {
  ito::BlockGenerator f = ito::BlockGenerator::zero(2, 1);
  f.K(0, 0) = Complex(0.1, -1e-300);
  f.K(0, 1) = Complex(1e300, 3.0000000000000004);
  f.K(1, 0) = Complex(-0.0, 0.0);
  f.C(1, 1) = Complex(1.0 + 1e-15, 0.0);
  const auto back = jsonio::generator_from_json(jsonio::generator_to_json(f));
  CHECK(bit_equal(f, back));
}

TEST_CASE("sampler output round trips") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = ito::sample_quasicontractive(2, 2, 0.5, seed);
    const auto back =
        jsonio::generator_from_json(jsonio::generator_to_json(f));
    CHECK(bit_equal(f, back));
  }
}

TEST_CASE("schema errors carry the offending field") {
  const auto base = jsonio::generator_to_json(ito::sample_quasicontractive(
      2, 1, 0.0, 9));

  {
    json j = base;
    j.erase("L");
    CHECK_THROWS_WITH_AS(jsonio::generator_from_json(j),
                         doctest::Contains("L"), std::invalid_argument);
  }
  {
    json j = base;
    j["d_h"] = -1;
    CHECK_THROWS_AS(jsonio::generator_from_json(j), std::invalid_argument);
  }
  {
    json j = base;
    j["d_k"] = 1.5;
    CHECK_THROWS_AS(jsonio::generator_from_json(j), std::invalid_argument);
  }
  {
    json j = base;
    j["K"][0][0] = json::array({0.0});  // complex entries need [re, im]
    CHECK_THROWS_AS(jsonio::generator_from_json(j), std::invalid_argument);
  }
  {
    json j = base;
    j["K"][0][0][1] = "x";
    CHECK_THROWS_AS(jsonio::generator_from_json(j), std::invalid_argument);
  }
  {
    json j = base;
    j["M"][0].push_back(json::array({0.0, 0.0}));  // wrong width
    CHECK_THROWS_WITH_AS(jsonio::generator_from_json(j),
                         doctest::Contains("M"), std::invalid_argument);
  }
  {
    json j = base;
    j["C"][0][0][0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(jsonio::generator_from_json(j), std::invalid_argument);
  }
}

TEST_CASE("parse errors report the line") {
  const std::string text = "{\n  \"d_h\": 2,\n  \"K\": [[\n}";
  try {
    jsonio::parse_text(text, "inline");
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("inline:4") != std::string::npos);
  }
}

TEST_CASE("step functions round trip and validate") {
  sim::StepFunction s;
  s.breaks = {0.25, 0.5};
  s.values = {CVector(2), CVector(2), CVector(2)};
  s.values[0] << Complex(1.0, 0.0), Complex(0.0, -2.0);
  s.values[1] << Complex(0.5, 0.5), Complex(0.0, 0.0);
  s.values[2] << Complex(-1e-9, 0.0), Complex(3.0, 4.0);
  s.validate();

  const json j = jsonio::step_to_json(s);
  const auto back = jsonio::step_from_json(j, 2);
  REQUIRE(back.breaks.size() == 2);
  REQUIRE(back.values.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(bit_equal(CMatrix(back.values[i]), CMatrix(s.values[i])));

  // Count mismatch between breaks and values.
  json bad = j;
  bad["values"].erase(2);
  CHECK_THROWS_AS(jsonio::step_from_json(bad, 2), std::invalid_argument);
  // Wrong value dimension against the ambient noise space.
  CHECK_THROWS_AS(jsonio::step_from_json(j, 3), std::invalid_argument);
  // Unsorted breaks.
  json unsorted = j;
  unsorted["breaks"] = json::array({0.5, 0.25});
  CHECK_THROWS_AS(jsonio::step_from_json(unsorted, 2), std::invalid_argument);
}

TEST_CASE("empty noise space serializes cleanly") {
  ito::BlockGenerator f = ito::BlockGenerator::zero(3, 0);
  f.K = testsupport::Rng(7).cmatrix(3, 3);
  const json j = jsonio::generator_to_json(f);
  CHECK(j["M"].is_array());
  const auto back = jsonio::generator_from_json(j);
  CHECK(bit_equal(f, back));

  sim::StepFunction empty = sim::StepFunction::constant(CVector(0));
  const auto eb = jsonio::step_from_json(jsonio::step_to_json(empty), 0);
  CHECK(eb.values.size() == 1);
  CHECK(eb.values[0].size() == 0);
}

TEST_CASE("file loading prefixes the path") {
  CHECK_THROWS_WITH_AS(jsonio::load_generator("/nonexistent/f.json"),
                       doctest::Contains("/nonexistent/f.json"),
                       std::invalid_argument);
}
