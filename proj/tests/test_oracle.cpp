#include <doctest.h>

#include <cmath>
#include <vector>

#include "mbq/engine.hpp"
#include "mbq/factor.hpp"
#include "mbq/oracle.hpp"
#include "mbq/products.hpp"
#include "mbq/quadrature.hpp"

using namespace mbq;

namespace {

PricingProblem single_asset(double forward, double vol, double expiry, Vector strikes) {
  BasketInputs in;
  in.weights = {1.0};
  in.spots = {forward};
  in.forwards = Vector{forward};
  in.vols = {vol};
  in.correlation = Matrix::identity(1);
  in.expiry = expiry;
  in.strikes = std::move(strikes);
  return basket(in);
}

double converged_call(const PricingProblem& p, std::size_t i, double lambda = 12.0) {
  PricingConfig config;
  config.lambda = lambda;
  return price_problem(p, config)[i].call_cv;
}

}  // namespace

TEST_CASE("closed forms") {
  CHECK(oracle::bsm_single(100.0, 100.0, 0.2) == doctest::Approx(7.96557).epsilon(1e-6));
  CHECK(oracle::bsm_single(100.0, 1e-300, 0.2) == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(oracle::bsm_single(100.0, 1e4, 0.2) > 0.0);

  CHECK(oracle::margrabe(100.0, 100.0, 0.3, 0.3, 1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));

  PricingProblem s1 = presets::s1({0.0});
  double m = oracle::margrabe(s1.forwards[0], s1.forwards[1], 0.2, 0.1, 0.5, 1.0);
  CHECK(std::abs(m * s1.discount_factor() - 8.5132252) <= 1e-7);
}

TEST_CASE("Golub-Welsch agrees with the cached rules") {
  for (int n : {1, 2, 5, 17, 40, 64}) {
    oracle::HermiteRule gw = oracle::golub_welsch_hermite(n);
    const GaussHermiteRule& ref = gauss_hermite(n);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(gw.nodes[i] - ref.nodes[i]) <= 1e-11 * std::max(1.0, std::abs(ref.nodes[i])));
      CHECK(std::abs(gw.weights[i] - ref.weights[i]) <= 1e-12);
    }
  }
  oracle::HermiteRule big = oracle::golub_welsch_hermite(200);
  double total = 0.0, second = 0.0;
  for (std::size_t i = 0; i < big.nodes.size(); ++i) {
    total += big.weights[i];
    second += big.weights[i] * big.nodes[i] * big.nodes[i];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(second == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("oracle covariance matches the factor module") {
  for (const PricingProblem& p : {presets::s1({0.0}), presets::b2(2.0, {100.0}), presets::a2(12, {100.0})}) {
    Matrix a = oracle::covariance(p);
    Matrix b = build_covariance(p).entries;
    CHECK(frobenius_norm(a - b) <= 1e-15);
  }
}

TEST_CASE("full grid on one asset") {
  PricingProblem p = single_asset(100.0, 0.2, 1.0, {90.0, 100.0, 110.0});
  auto fine = oracle::full_grid_price(p, 200);
  for (std::size_t i = 0; i < 3; ++i) {
    double expected = oracle::bsm_single(100.0, p.strikes[i], 0.2);
    // The payoff kink caps raw Gauss-Hermite accuracy near 1e-2 at 200 nodes.
    CHECK(std::abs(fine[i].call - expected) <= 3e-2);
    CHECK(std::abs(price_problem(p)[i].call - expected) <= 1e-12 * 100.0);
  }
  // Without a kink the rule is exact.
  PricingProblem smooth = single_asset(100.0, 0.2, 1.0, {0.0});
  CHECK(oracle::full_grid_price(smooth, 40)[0].call == doctest::Approx(100.0).epsilon(1e-13));
}

TEST_CASE("full grid converges slowly on S1") {
  PricingProblem p = presets::s1({0.0, 2.0, 4.0});
  PricingConfig config;
  config.lambda = 9.0;
  auto method = price_problem(p, config);
  auto coarse = oracle::full_grid_price(p, 50);
  auto fine = oracle::full_grid_price(p, 200);
  for (std::size_t i = 0; i < 3; ++i) {
    double e_fine = std::abs(fine[i].call - method[i].call_cv);
    CHECK(e_fine <= 2e-4);
    CHECK(e_fine <= std::abs(coarse[i].call - method[i].call_cv) + 1e-12);
  }
}

TEST_CASE("adaptive integration agrees with the method") {
  std::vector<PricingProblem> problems{presets::s1({0.0, 2.0, 4.0}), presets::s2(0.9),
                                       presets::s2(-0.9), presets::s2(0.0)};
  for (const PricingProblem& p : problems) {
    auto reference = oracle::adaptive_price(p);
    PricingConfig config;
    config.lambda = 12.0;
    auto method = price_problem(p, config);
    for (std::size_t i = 0; i < reference.size(); ++i) {
      CHECK(std::abs(reference[i].call - method[i].call_cv) <= 1e-7);
      CHECK(std::abs(reference[i].put - method[i].put_cv) <= 1e-7);
    }
  }
}

TEST_CASE("Monte Carlo") {
  SUBCASE("reproducible for a fixed seed and any thread count") {
    PricingProblem p = presets::b1(0.4, 0.4, 0.5, {100.0});
    auto a = oracle::mc_price(p, 50'000, 42, 1);
    auto b = oracle::mc_price(p, 50'000, 42, 3);
    auto c = oracle::mc_price(p, 50'000, 43, 1);
    CHECK(a[0].call == b[0].call);
    CHECK(a[0].call_stderr == b[0].call_stderr);
    CHECK(a[0].call != c[0].call);
  }
  SUBCASE("zero volatility gives the intrinsic forward value") {
    PricingProblem p = presets::b1(1e-12, 1e-12, 0.5, {90.0, 110.0});
    auto mc = oracle::mc_price(p, 20'000, 1);
    CHECK(mc[0].call == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(mc[1].call == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(mc[1].put == doctest::Approx(10.0).epsilon(1e-9));
  }
  SUBCASE("brackets the quadrature price") {
    std::vector<PricingProblem> problems{presets::s1({2.0}), presets::b1(0.4, 0.4, 0.5, {100.0}),
                                         presets::a1(0.3, {100.0})};
    for (const PricingProblem& p : problems) {
      auto mc = oracle::mc_price(p, 200'000, 7);
      double q = converged_call(p, 0);
      CHECK(std::abs(mc[0].call - q) <= 3.0 * mc[0].call_stderr);
    }
  }
  SUBCASE("S1 at K = 2 against the published value") {
    PricingProblem p = presets::s1({2.0});
    auto mc = oracle::mc_price(p, 400'000, 5);
    CHECK(std::abs(mc[0].call * p.discount_factor() - 7.5423239) <=
          3.0 * mc[0].call_stderr * p.discount_factor());
  }
  SUBCASE("rejects tiny path counts") {
    CHECK_THROWS(oracle::mc_price(presets::s1({2.0}), 100, 1));
  }
}

TEST_CASE("rotated coordinates beat the unrotated grid on the unit example") {
  // Two independent standard normal log prices with F = e^{1/2}: the put pays (K - e^{x1} - e^{x2})^+.
  PricingProblem p;
  p.weights = {1.0, 1.0};
  p.forwards = {std::exp(0.5), std::exp(0.5)};
  p.vols = {1.0, 1.0};
  p.times = {1.0, 1.0};
  p.correlation = Matrix::identity(2);
  p.expiry = 1.0;
  p.strikes = {2.0, 4.0};
  auto reference = oracle::adaptive_price(p);
  for (int n = 4; n <= 32; n += 4) {
    PricingConfig config;
    config.nodes = std::vector<int>{n};
    config.control_variate = false;
    auto rotated = price_problem(p, config);
    auto unrotated = oracle::full_grid_price(p, n);
    for (std::size_t i = 0; i < 2; ++i) {
      CAPTURE(n);
      CHECK(std::abs(rotated[i].put - reference[i].put) < std::abs(unrotated[i].put - reference[i].put));
    }
  }
}
