#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>

#include "mbq/engine.hpp"
#include "mbq/error.hpp"
#include "mbq/factor.hpp"
#include "mbq/problem_json.hpp"
#include "mbq/products.hpp"
#include "mbq/report.hpp"

using namespace mbq;

namespace {

std::string schema_message(const std::string& text) {
  try {
    problem_from_json(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Schema);
    return e.what();
  }
  FAIL("expected a schema error for " << text);
  return {};
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

TEST_CASE("spread from json matches the preset") {
  PricingProblem p = problem_from_json(R"({
    "type": "spread", "spots": [100, 96], "dividends": [0.05, 0.05], "rate": 0.1,
    "vols": [0.2, 0.1], "correlation": 0.5, "expiry": 1.0, "weights": [1, -1],
    "strikes": [0, 2, 4]})");
  PricingProblem q = presets::s1({0.0, 2.0, 4.0});
  CHECK(p.kind == ProductKind::Spread);
  CHECK(p.forwards == q.forwards);
  CHECK(p.vols == q.vols);
  CHECK(p.strikes == q.strikes);
  CHECK(price_problem(p)[0].call_cv == price_problem(q)[0].call_cv);
}

TEST_CASE("basket with forwards and a correlation matrix") {
  PricingProblem p = problem_from_json(R"({
    "type": "basket", "forwards": [100, 110], "vols": [0.3, 0.2], "rate": 0.02,
    "correlation": [[1, 0.4], [0.4, 1]], "expiry": 2, "weights": [0.5, 0.5], "strike": 100})");
  CHECK(p.forwards[1] == 110.0);
  CHECK(p.correlation(0, 1) == 0.4);
  CHECK(p.strikes.size() == 1);
  CHECK(p.discount_factor() == doctest::Approx(std::exp(-0.04)));
}

TEST_CASE("asian problems from json") {
  PricingProblem d = problem_from_json(R"({
    "type": "asian_discrete", "spot": 100, "vol": 0.3, "rate": 0.09, "dividend": 0,
    "times": [0, 0.5, 1], "strikes": [100], "epsilon": 0.02})");
  CHECK(d.size() == 2);
  CHECK(d.strike_shift == doctest::Approx(100.0 / 3.0));
  CHECK(d.epsilon == 0.02);

  PricingProblem c = problem_from_json(R"({
    "type": "asian_continuous", "spot": 2, "vol": 0.1, "rate": 0.02, "dividend": 0,
    "expiry": 1, "dt": 0.005, "strike": 2})");
  CHECK(c.kind == ProductKind::AsianContinuous);
  CHECK(c.size() == 200);
}

TEST_CASE("schema errors name the offending field") {
  CHECK(starts_with(schema_message("[1, 2]"), "$: expected an object"));
  CHECK(starts_with(schema_message("{nope"), "$: invalid JSON"));
  CHECK(starts_with(schema_message(R"({"type": "swap"})"), "$.type:"));
  CHECK(starts_with(schema_message(R"({"type": "basket", "forwards": [1, 1], "vols": [0.2, "x"],
      "correlation": 0, "expiry": 1, "weights": [1, 1], "strike": 1})"),
                    "$.vols[1]: expected a number"));
  CHECK(starts_with(schema_message(R"({"type": "basket", "forwards": [1, 1], "vols": [0.2, 0.2],
      "correlation": [[1, 0], [0]], "expiry": 1, "weights": [1, 1], "strike": 1})"),
                    "$.correlation[1]"));
  CHECK(starts_with(schema_message(R"({"type": "basket", "forwards": [1, 1], "vols": [0.2, 0.2],
      "correlation": 0, "expiry": 1, "weights": [1, 1]})"),
                    "$.strikes: missing required field"));
  CHECK(starts_with(schema_message(R"({"type": "basket", "forwards": [1, 1], "vols": [0.2, 0.2],
      "correlation": 0, "expiry": 1, "weights": [1, 1], "strike": 1, "colour": "red"})"),
                    "$.colour: unknown field"));
  CHECK(starts_with(schema_message(R"({"type": "spread", "spots": [1, 1], "vols": [0.2, 0.2],
      "correlation": 0, "expiry": 1, "weights": [1, 1], "strike": 1, "rate": 0})"),
                    "$:"));
}

TEST_CASE("missing files are io errors") {
  try {
    problem_from_file("/nonexistent/problem.json");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("S1 factor display") {
  PricingProblem p = presets::s1({0.0});
  FactorMatrix v = build_factor_matrix(p);
  std::string text = factor_display(v, forward_weights(p), {4});
  CHECK(text.find("0.125") != std::string::npos);
  CHECK(text.find("0.172") != std::string::npos);
  CHECK(text.find("0.143") != std::string::npos);
  CHECK(text.find("0.224") != std::string::npos);
  CHECK(text.find("0.721") != std::string::npos);
  CHECK(text.find("-0.693") != std::string::npos);
  CHECK(text.find("-0.001") != std::string::npos);
  CHECK(text.find("0.200") != std::string::npos);
  CHECK(text.find("0.100") != std::string::npos);
}

TEST_CASE("B1 factor display") {
  PricingProblem p = presets::b1(0.4, 0.4, 0.5, {100.0});
  PricingConfig config;
  config.lambda = 9.0;
  std::string text = factor_display(plan_pricing(p, config));
  CHECK(text.find("1.414") != std::string::npos);
  CHECK(text.find("0.632") != std::string::npos);
  CHECK(text.find("0.894") != std::string::npos);
  CHECK(text.find("0.500") != std::string::npos);
  CHECK(text.find("125") != std::string::npos);
}

TEST_CASE("single asset factor display") {
  PricingProblem p = problem_from_json(R"({"type": "basket", "forwards": [100], "vols": [0.2],
      "expiry": 1, "weights": [1], "strike": 100})");
  std::string text = factor_display(plan_pricing(p, PricingConfig{}));
  CHECK(text.find("0.200") != std::string::npos);
  CHECK(text.find("1.000") != std::string::npos);
}
