#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mbq/factor.hpp"
#include "mbq/kernel.hpp"
#include "mbq/problem.hpp"
#include "mbq/quadrature.hpp"

namespace mbq {

inline constexpr double kFastLambda = 3.0;
inline constexpr double kConvergedLambda = 9.0;
inline constexpr int kAsianNodes = 3;
inline constexpr std::size_t kAsianKeep = 5;

/// How the quadrature grid is chosen for a problem.
///
/// Without explicit settings, spread/basket problems use the node-size rule
/// with lambda = 3, and Asian problems use three nodes on factors 2..5 with
/// the remaining factors truncated.
struct PricingConfig {
  std::optional<double> lambda;
  std::optional<std::vector<int>> nodes;          // explicit M_2, M_3, ...
  std::vector<std::pair<int, int>> node_overrides;  // (factor index j >= 2, M_j)
  std::optional<std::size_t> keep;                // forced N'
  bool control_variate = true;
  unsigned threads = 0;
};

struct PricingPlan {
  ForwardWeights weights;
  FactorMatrix full;
  FactorMatrix reduced;
  std::vector<int> rule_sizes;  // M_j for j = 2..N before truncation
  QuadratureGrid grid;
};

PricingPlan plan_pricing(const PricingProblem& problem, const PricingConfig& config);

std::vector<PricingResult> price_plan(const PricingProblem& problem, const PricingPlan& plan,
                                      const PricingConfig& config);

/// Plans and prices every strike of the problem.
std::vector<PricingResult> price_problem(const PricingProblem& problem,
                                         const PricingConfig& config = {});

}  // namespace mbq
