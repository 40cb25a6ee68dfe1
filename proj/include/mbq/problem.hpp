#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mbq/linalg.hpp"

namespace mbq {

enum class ProductKind { Spread, Basket, AsianDiscrete, AsianContinuous, Generic };

const char* to_string(ProductKind kind) noexcept;

/// A call/put on sum_k w_k S_k(t_k) - K under correlated GBMs.
///
/// Forwards are stored directly; the product constructors derive them from
/// spots, rates and dividend yields. For Asian products every row refers to
/// the same underlying observed at increasing times, and an observation at
/// t = 0 is folded into `strike_shift` (its value is known today).
struct PricingProblem {
  ProductKind kind = ProductKind::Generic;
  Vector weights;
  Vector forwards;
  Vector vols;
  Vector times;
  Matrix correlation;
  double rate = 0.0;
  Vector strikes;
  double strike_shift = 0.0;  // deterministic leg, subtracted from every strike
  double expiry = 0.0;        // discounting horizon, max of observation times
  double epsilon = 0.01;      // first-factor adjustment scale
  bool single_underlying = false;

  std::size_t size() const noexcept { return weights.size(); }
  double effective_strike(double strike) const noexcept { return strike - strike_shift; }
  double discount_factor() const;

  /// Throws InvalidArgument / InvalidCorrelation on inconsistent data.
  void validate() const;
};

}  // namespace mbq
