#pragma once

#include <string>
#include <string_view>

#include "mbq/problem.hpp"

namespace mbq {

/// Builds a problem from a JSON description. `type` selects the product:
///
///   spread, basket:   weights, spots + rate + dividends | forwards, vols,
///                     correlation (number or matrix), expiry
///   asian_discrete:   spot, vol, rate, dividend, times, weights (default uniform)
///   asian_continuous: spot, vol, rate, dividend, expiry, dt
///
/// plus `strikes` (array) or `strike` (number) and an optional `epsilon`.
/// Violations throw Error(Schema) with a message starting at the offending
/// field path, e.g. "$.vols[1]: expected a positive number".
PricingProblem problem_from_json(std::string_view text);
PricingProblem problem_from_file(const std::string& path);

}  // namespace mbq
