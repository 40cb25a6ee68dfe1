#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mbq/factor.hpp"
#include "mbq/linalg.hpp"
#include "mbq/problem.hpp"
#include "mbq/quadrature.hpp"

namespace mbq {

/// Standard normal CDF via erfc; accurate in both tails.
double normal_cdf(double x) noexcept;

/// Exercise boundary of a single-factor multi-asset BSM problem:
///   Σ_k forward_k exp(-vol_k²/2 + vol_k z) = strike,
/// where forward_k = w_k F_k f_k(ż) (signed) and vol_k = V_k1 with
/// w_k vol_k > 0. The root is z = -d.
struct BoundaryProblem {
  std::span<const double> forward;
  std::span<const double> vol;
  double strike = 0.0;
};

struct BoundarySolution {
  double d = 0.0;  // may be +inf (always exercised) or -inf (never)
  int iterations = 0;
  bool converged = true;
};

BoundarySolution solve_boundary(const BoundaryProblem& bp) noexcept;

/// Σ_k forward_k N(d + vol_k) - K N(d).
double bs_multi_call(const BoundaryProblem& bp, double d) noexcept;
/// K N(-d) - Σ_k forward_k N(-d - vol_k).
double bs_multi_put(const BoundaryProblem& bp, double d) noexcept;

/// f_k(ż) = exp(-½ Σ_{j>=2} V_kj² + V_k ż). zdot has one entry per column of
/// v and its first entry must be zero.
Vector coefficient_f(const FactorMatrix& v, std::span<const double> zdot);

struct PricingResult {
  double strike = 0.0;  // as quoted, before any deterministic-leg shift
  double call = 0.0;
  double put = 0.0;
  double binary = 0.0;
  double call_cv = 0.0;
  double put_cv = 0.0;
  Vector deltas;
  Vector fbar;
  std::size_t grid_size = 0;
  std::size_t boundary_failures = 0;
  double forward = 0.0;   // Σ w_k F_k
  double discount = 1.0;  // e^{-rT}
  bool control_variate = true;

  // Forward values honoring the control-variate flag.
  double call_value() const noexcept { return control_variate ? call_cv : call; }
  double put_value() const noexcept { return control_variate ? put_cv : put; }
  double call_pv() const noexcept { return discount * call_value(); }
  double put_pv() const noexcept { return discount * put_value(); }
};

struct KernelOptions {
  bool control_variate = true;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Quadrature sum of single-factor BSM values over the grid, for every strike
/// in one pass. Values are forward (undiscounted). The grid must cover factor
/// columns 2..N' of v. Node contributions are reduced in fixed-size chunks in
/// lexicographic order, so results do not depend on the thread count.
std::vector<PricingResult> price(const PricingProblem& problem, const FactorMatrix& v,
                                 const QuadratureGrid& grid, std::span<const double> strikes,
                                 const KernelOptions& options = {});

PricingResult price(const PricingProblem& problem, const FactorMatrix& v,
                    const QuadratureGrid& grid, double strike, const KernelOptions& options = {});

}  // namespace mbq
