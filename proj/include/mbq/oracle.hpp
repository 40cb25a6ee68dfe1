#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mbq/linalg.hpp"
#include "mbq/problem.hpp"

// Reference prices computed without the analytic first-factor step. Everything
// here is undiscounted (forward value) and uses its own covariance and
// quadrature code so it can be compared against the pricing kernel.
namespace mbq::oracle {

struct McEstimate {
  double strike = 0.0;
  double call = 0.0;
  double call_stderr = 0.0;
  double put = 0.0;
  double put_stderr = 0.0;
};

struct ReferencePrice {
  double strike = 0.0;
  double call = 0.0;
  double put = 0.0;
};

inline constexpr std::size_t kMinPaths = 10'000;
inline constexpr int kMaxFullGridNodes = 200;

/// Antithetic Monte Carlo of the terminal payoff. Paths are split in fixed
/// batches, each seeded by splitmix64 from (seed, batch index) and driving a
/// mt19937_64 stream; normals come from the inverse normal CDF so each
/// antithetic pair is exact. Results are bit-identical for fixed
/// (seed, paths) regardless of the thread count.
std::vector<McEstimate> mc_price(const PricingProblem& problem, std::size_t paths,
                                 std::uint64_t seed, unsigned threads = 0);

/// Exchange option F1 N(d+) - F2 N(d-) with total variances v1², v2².
double margrabe(double f1, double f2, double v1, double v2, double rho, double expiry);

/// Black-Scholes forward call value.
double bsm_single(double forward, double strike, double total_vol);

/// Probabilists' Gauss-Hermite rule by Golub-Welsch, for orders up to 200.
struct HermiteRule {
  Vector nodes;
  Vector weights;
};
HermiteRule golub_welsch_hermite(int order);

/// Tensor Gauss-Hermite quadrature of the raw payoff over all N dimensions,
/// with log prices X = factor · x. The default factor is the Cholesky factor
/// of the covariance. N <= 3, nodes_per_dim <= 200.
std::vector<ReferencePrice> full_grid_price(const PricingProblem& problem, int nodes_per_dim,
                                            const Matrix* factor = nullptr);

/// Nested adaptive Gauss-Kronrod integration of the raw payoff over the
/// Cholesky coordinates on [-12, 12]^N. N <= 2.
std::vector<ReferencePrice> adaptive_price(const PricingProblem& problem,
                                           double tolerance = 1e-12);

/// Σ_kj = ρ_kj σ_k σ_j min(t_k, t_j), computed independently of the factor
/// module.
Matrix covariance(const PricingProblem& problem);

}  // namespace mbq::oracle
