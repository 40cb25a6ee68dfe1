#pragma once

#include <array>
#include <optional>
#include <span>

#include "mbq/linalg.hpp"
#include "mbq/problem.hpp"

namespace mbq {

struct SpreadInputs {
  std::array<double, 2> spots{};
  std::optional<std::array<double, 2>> forwards;  // overrides spots/rate/dividends
  std::array<double, 2> vols{};
  double correlation = 0.0;
  std::array<double, 2> dividends{};
  double rate = 0.0;
  double expiry = 1.0;
  std::array<double, 2> weights{1.0, -1.0};
  Vector strikes;
};

struct BasketInputs {
  Vector weights;
  Vector spots;
  std::optional<Vector> forwards;
  Vector vols;
  Matrix correlation;
  Vector dividends;  // empty means zero
  double rate = 0.0;
  double expiry = 1.0;
  Vector strikes;
};

/// Two-asset spread; exactly one weight positive and one negative.
PricingProblem spread(const SpreadInputs& in);

/// Basket with positive weights, all observed at expiry.
PricingProblem basket(const BasketInputs& in);

/// Discretely monitored fixed-strike Asian on one underlying.
///
/// times must be strictly increasing and non-negative; weights positive and
/// summing to one. An observation at t = 0 is deterministic and shifts the
/// strike by w_0 S_0 instead of adding a zero-variance row.
PricingProblem asian_discrete(double spot, double vol, double dividend, double rate,
                              std::span<const double> times, std::span<const double> weights,
                              Vector strikes);

/// Continuously monitored Asian, discretized on t_k = k dT with composite
/// Simpson weights. T / dT must be an even integer.
PricingProblem asian_continuous(double spot, double vol, double dividend, double rate,
                                double expiry, double dt, Vector strikes);

Matrix uniform_correlation(std::size_t n, double rho);

// Benchmark parameter sets.
namespace presets {

PricingProblem s1(Vector strikes);
PricingProblem s2(double correlation);
/// B1 with sigma on assets 1..3 and sigma4 on asset 4.
PricingProblem b1(double vol_first3, double vol4, double correlation, Vector strikes);
PricingProblem b2(double expiry, Vector strikes);
PricingProblem a1(double vol, Vector strikes);
PricingProblem a2(int observations, Vector strikes);

struct A3Case {
  double expiry;
  double spot;
  double vol;
  double rate;
};
inline constexpr std::array<A3Case, 7> kA3Cases{{
    {1.0, 2.0, 0.10, 0.02},
    {1.0, 2.0, 0.30, 0.18},
    {2.0, 2.0, 0.25, 0.0125},
    {1.0, 1.9, 0.50, 0.05},
    {1.0, 2.0, 0.50, 0.05},
    {1.0, 2.1, 0.50, 0.05},
    {2.0, 2.0, 0.50, 0.05},
}};
inline constexpr double kA3Strike = 2.0;
inline constexpr double kA3Step = 1.0 / 200.0;

/// case_index is 1-based as in the published table.
PricingProblem a3(int case_index);

/// Normalized Asian average: sigma = 1, T = 1, r = q = 0, t_k = k/N, w_k = 1/N.
PricingProblem normalized_asian(int observations);

}  // namespace presets

}  // namespace mbq
