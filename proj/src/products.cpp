#include "mbq/products.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "mbq/error.hpp"

namespace mbq {

Matrix uniform_correlation(std::size_t n, double rho) {
  Matrix c(n, n, rho);
  for (std::size_t i = 0; i < n; ++i) c(i, i) = 1.0;
  return c;
}

PricingProblem spread(const SpreadInputs& in) {
  if (!((in.weights[0] > 0.0 && in.weights[1] < 0.0) || (in.weights[0] < 0.0 && in.weights[1] > 0.0)))
    throw Error(ErrorCode::InvalidArgument, "spread needs one positive and one negative weight");
  BasketInputs b;
  b.weights = {in.weights[0], in.weights[1]};
  b.spots = {in.spots[0], in.spots[1]};
  if (in.forwards) b.forwards = Vector{(*in.forwards)[0], (*in.forwards)[1]};
  b.vols = {in.vols[0], in.vols[1]};
  b.correlation = uniform_correlation(2, in.correlation);
  b.dividends = {in.dividends[0], in.dividends[1]};
  b.rate = in.rate;
  b.expiry = in.expiry;
  b.strikes = in.strikes;

  // Shares the construction path with baskets but skips the sign check.
  PricingProblem p;
  p.kind = ProductKind::Spread;
  p.weights = b.weights;
  p.vols = b.vols;
  p.times = {in.expiry, in.expiry};
  p.correlation = b.correlation;
  p.rate = in.rate;
  p.expiry = in.expiry;
  p.strikes = in.strikes;
  if (b.forwards) {
    p.forwards = *b.forwards;
  } else {
    p.forwards = {in.spots[0] * std::exp((in.rate - in.dividends[0]) * in.expiry),
                  in.spots[1] * std::exp((in.rate - in.dividends[1]) * in.expiry)};
  }
  p.validate();
  return p;
}

PricingProblem basket(const BasketInputs& in) {
  const std::size_t n = in.weights.size();
  for (double w : in.weights)
    if (!(w > 0.0)) throw Error(ErrorCode::InvalidArgument, "basket weights must be positive");
  if (!(in.expiry > 0.0)) throw Error(ErrorCode::InvalidArgument, "expiry must be positive");
  PricingProblem p;
  p.kind = ProductKind::Basket;
  p.weights = in.weights;
  p.vols = in.vols;
  p.times.assign(n, in.expiry);
  p.correlation = in.correlation;
  p.rate = in.rate;
  p.expiry = in.expiry;
  p.strikes = in.strikes;
  if (in.forwards) {
    p.forwards = *in.forwards;
  } else {
    if (in.spots.size() != n) throw Error(ErrorCode::InvalidArgument, "spots length must match weights");
    if (!in.dividends.empty() && in.dividends.size() != n)
      throw Error(ErrorCode::InvalidArgument, "dividends length must match weights");
    p.forwards.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double q = in.dividends.empty() ? 0.0 : in.dividends[k];
      p.forwards[k] = in.spots[k] * std::exp((in.rate - q) * in.expiry);
    }
  }
  p.validate();
  return p;
}

PricingProblem asian_discrete(double spot, double vol, double dividend, double rate,
                              std::span<const double> times, std::span<const double> weights,
                              Vector strikes) {
  if (times.size() != weights.size() || times.empty())
    throw Error(ErrorCode::InvalidArgument, "times and weights must be non-empty and of equal length");
  if (!(spot > 0.0)) throw Error(ErrorCode::InvalidArgument, "spot must be positive");
  double total = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(weights[k] > 0.0)) throw Error(ErrorCode::InvalidArgument, "Asian weights must be positive");
    if (times[k] < 0.0 || (k > 0 && !(times[k] > times[k - 1])))
      throw Error(ErrorCode::NonIncreasingTimes, "observation times must be strictly increasing");
    total += weights[k];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "Asian weights must sum to one");

  PricingProblem p;
  p.kind = ProductKind::AsianDiscrete;
  p.single_underlying = true;
  p.rate = rate;
  p.strikes = std::move(strikes);
  std::size_t start = 0;
  if (times[0] == 0.0) {
    p.strike_shift = weights[0] * spot;
    start = 1;
  }
  const std::size_t n = times.size() - start;
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "Asian needs an observation after t = 0");
  for (std::size_t k = start; k < times.size(); ++k) {
    p.weights.push_back(weights[k]);
    p.times.push_back(times[k]);
    p.forwards.push_back(spot * std::exp((rate - dividend) * times[k]));
    p.vols.push_back(vol);
  }
  p.correlation = Matrix(n, n, 1.0);
  p.expiry = p.times.back();
  p.validate();
  return p;
}

PricingProblem asian_continuous(double spot, double vol, double dividend, double rate,
                                double expiry, double dt, Vector strikes) {
  if (!(expiry > 0.0) || !(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "expiry and dt must be positive");
  const double steps = expiry / dt;
  const long n = std::lround(steps);
  if (std::abs(steps - static_cast<double>(n)) > 1e-9 * steps || n < 2 || n % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "T / dT must be an even integer");
  Vector times(n + 1), weights(n + 1);
  const double unit = dt / (3.0 * expiry);
  for (long k = 0; k <= n; ++k) {
    times[k] = k * dt;
    weights[k] = (k == 0 || k == n) ? unit : (k % 2 == 1 ? 4.0 * unit : 2.0 * unit);
  }
  times[n] = expiry;
  PricingProblem p = asian_discrete(spot, vol, dividend, rate, times, weights, std::move(strikes));
  p.kind = ProductKind::AsianContinuous;
  return p;
}

namespace presets {

PricingProblem s1(Vector strikes) {
  SpreadInputs in;
  in.spots = {100.0, 96.0};
  in.vols = {0.2, 0.1};
  in.correlation = 0.5;
  in.dividends = {0.05, 0.05};
  in.rate = 0.1;
  in.expiry = 1.0;
  in.strikes = std::move(strikes);
  return spread(in);
}

PricingProblem s2(double correlation) {
  SpreadInputs in;
  in.spots = {200.0, 100.0};
  in.vols = {0.15, 0.30};
  in.correlation = correlation;
  in.rate = 0.0;
  in.expiry = 1.0;
  in.strikes = {100.0};
  return spread(in);
}

PricingProblem b1(double vol_first3, double vol4, double correlation, Vector strikes) {
  BasketInputs in;
  in.weights.assign(4, 0.25);
  in.spots.assign(4, 100.0);
  in.vols = {vol_first3, vol_first3, vol_first3, vol4};
  in.correlation = uniform_correlation(4, correlation);
  in.rate = 0.0;
  in.expiry = 5.0;
  in.strikes = std::move(strikes);
  return basket(in);
}

PricingProblem b2(double expiry, Vector strikes) {
  // G-7 index basket.
  BasketInputs in;
  in.weights = {0.10, 0.15, 0.15, 0.05, 0.20, 0.10, 0.25};
  in.vols = {0.1155, 0.2068, 0.1453, 0.1799, 0.1559, 0.1462, 0.1568};
  in.dividends = {0.0169, 0.0239, 0.0136, 0.0192, 0.0081, 0.0362, 0.0166};
  in.spots.assign(7, 100.0);
  const double upper[7][7] = {
      {1, 0.35, 0.10, 0.27, 0.04, 0.17, 0.71},
      {0, 1, 0.39, 0.27, 0.50, -0.08, 0.15},
      {0, 0, 1, 0.53, 0.70, -0.23, 0.09},
      {0, 0, 0, 1, 0.46, -0.22, 0.32},
      {0, 0, 0, 0, 1, -0.29, 0.13},
      {0, 0, 0, 0, 0, 1, -0.03},
      {0, 0, 0, 0, 0, 0, 1},
  };
  in.correlation = Matrix(7, 7);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = i; j < 7; ++j) in.correlation(i, j) = in.correlation(j, i) = upper[i][j];
  in.rate = 0.063;
  in.expiry = expiry;
  in.strikes = std::move(strikes);
  return basket(in);
}

namespace {

PricingProblem uniform_asian_with_spot_leg(int observations, double spot, double vol, double rate,
                                           Vector strikes) {
  const auto n = static_cast<std::size_t>(observations);
  Vector times(n + 1), weights(n + 1, 1.0 / (observations + 1));
  for (std::size_t k = 0; k <= n; ++k) times[k] = static_cast<double>(k) / observations;
  return asian_discrete(spot, vol, 0.0, rate, times, weights, std::move(strikes));
}

}  // namespace

PricingProblem a1(double vol, Vector strikes) {
  return uniform_asian_with_spot_leg(50, 100.0, vol, 0.10, std::move(strikes));
}

PricingProblem a2(int observations, Vector strikes) {
  return uniform_asian_with_spot_leg(observations, 100.0, 0.17801, 0.0367, std::move(strikes));
}

PricingProblem a3(int case_index) {
  if (case_index < 1 || case_index > static_cast<int>(kA3Cases.size()))
    throw Error(ErrorCode::InvalidArgument, "A3 case index must be 1..7");
  const A3Case& c = kA3Cases[case_index - 1];
  return asian_continuous(c.spot, c.vol, 0.0, c.rate, c.expiry, kA3Step, {kA3Strike});
}

PricingProblem normalized_asian(int observations) {
  const auto n = static_cast<std::size_t>(observations);
  Vector times(n), weights(n, 1.0 / observations);
  for (std::size_t k = 0; k < n; ++k) times[k] = static_cast<double>(k + 1) / observations;
  // Last weight absorbs round-off so the sum check holds exactly.
  weights.back() = 1.0 - std::accumulate(weights.begin(), weights.end() - 1, 0.0);
  return asian_discrete(1.0, 1.0, 0.0, 0.0, times, weights, {1.0});
}

}  // namespace presets

}  // namespace mbq
