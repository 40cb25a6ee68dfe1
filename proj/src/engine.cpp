#include "mbq/engine.hpp"

#include <algorithm>
#include <string>

#include "mbq/error.hpp"

namespace mbq {

namespace {

bool is_asian(const PricingProblem& p) {
  return p.kind == ProductKind::AsianDiscrete || p.kind == ProductKind::AsianContinuous;
}

}  // namespace

PricingPlan plan_pricing(const PricingProblem& problem, const PricingConfig& config) {
  PricingPlan plan;
  plan.full = build_factor_matrix(problem);
  plan.weights = forward_weights(problem);
  const std::size_t n = problem.size();
  const std::size_t free_dims = n - 1;

  std::vector<int> sizes;
  std::optional<std::size_t> keep = config.keep;
  if (config.nodes) {
    sizes = *config.nodes;
    if (sizes.size() > free_dims)
      throw Error(ErrorCode::InvalidArgument, "more node sizes than factor dimensions");
    if (!keep) keep = 1 + sizes.size();
  } else if (config.lambda || !is_asian(problem)) {
    sizes = node_size_rule(plan.full.v, plan.weights.g, config.lambda.value_or(kFastLambda));
  } else {
    const std::size_t k = std::min(kAsianKeep, n);
    sizes.assign(k - 1, kAsianNodes);
    if (!keep) keep = k;
  }
  for (const auto& [dim, m] : config.node_overrides) {
    if (dim < 2 || static_cast<std::size_t>(dim) > n)
      throw Error(ErrorCode::InvalidArgument, "node override for factor " + std::to_string(dim) +
                                                  " outside 2.." + std::to_string(n));
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "node override must be >= 1");
    const auto idx = static_cast<std::size_t>(dim - 2);
    if (idx >= sizes.size()) sizes.resize(idx + 1, 1);
    sizes[idx] = m;
    if (keep && *keep < idx + 2) keep = idx + 2;
  }
  plan.rule_sizes = sizes;

  if (!keep) {
    std::size_t last = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j)
      if (sizes[j] > 1) last = j + 1;
    keep = 1 + last;
  }
  if (*keep < 1 || *keep > n)
    throw Error(ErrorCode::InvalidArgument, "keep must lie in [1, " + std::to_string(n) + "]");
  if (*keep - 1 > sizes.size())
    throw Error(ErrorCode::InvalidArgument, "node sizes missing for kept factors");

  plan.reduced = reduce(plan.full, *keep);
  plan.grid = tensor_grid(std::span<const int>(sizes.data(), *keep - 1));
  return plan;
}

std::vector<PricingResult> price_plan(const PricingProblem& problem, const PricingPlan& plan,
                                      const PricingConfig& config) {
  return price(problem, plan.reduced, plan.grid, problem.strikes,
               KernelOptions{config.control_variate, config.threads});
}

std::vector<PricingResult> price_problem(const PricingProblem& problem, const PricingConfig& config) {
  return price_plan(problem, plan_pricing(problem, config), config);
}

}  // namespace mbq
