#include "mbq/kernel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "mbq/error.hpp"

namespace mbq {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootCap = 60.0;
constexpr int kMaxRootIterations = 100;

struct Eval {
  double value;
  double slope;
};

// log Σ c_k exp(b_k (z - b_k/2)) - log K for positive c_k and K.
Eval eval_log_space(const BoundaryProblem& bp, double z, double log_strike) noexcept {
  double mx = -kInf;
  for (std::size_t k = 0; k < bp.forward.size(); ++k)
    mx = std::max(mx, std::log(bp.forward[k]) + bp.vol[k] * (z - 0.5 * bp.vol[k]));
  double s0 = 0.0;
  double s1 = 0.0;
  for (std::size_t k = 0; k < bp.forward.size(); ++k) {
    const double e = std::exp(std::log(bp.forward[k]) + bp.vol[k] * (z - 0.5 * bp.vol[k]) - mx);
    s0 += e;
    s1 += bp.vol[k] * e;
  }
  return {mx + std::log(s0) - log_strike, s1 / s0};
}

// Σ c_k exp(b_k (z - b_k/2)) - K; slope is positive since c_k b_k > 0.
Eval eval_linear_space(const BoundaryProblem& bp, double z, double* scale) noexcept {
  double s0 = 0.0;
  double s1 = 0.0;
  double mag = std::abs(bp.strike);
  for (std::size_t k = 0; k < bp.forward.size(); ++k) {
    const double t = bp.forward[k] * std::exp(bp.vol[k] * (z - 0.5 * bp.vol[k]));
    s0 += t;
    s1 += bp.vol[k] * t;
    mag += std::abs(t);
  }
  if (scale) *scale = mag;
  return {s0 - bp.strike, s1};
}

}  // namespace

BoundarySolution solve_boundary(const BoundaryProblem& bp) noexcept {
  bool any_pos = false;
  bool any_neg = false;
  for (double c : bp.forward) {
    if (c > 0.0) any_pos = true;
    if (c < 0.0) any_neg = true;
  }
  const double strike = bp.strike;
  if (!any_neg && strike <= 0.0) return {kInf, 0, true};
  if (!any_pos && strike >= 0.0) return {-kInf, 0, true};

  const bool log_space = !any_neg;
  const double log_strike = log_space ? std::log(strike) : 0.0;
  auto evaluate = [&](double z, double* scale) {
    return log_space ? eval_log_space(bp, z, log_strike) : eval_linear_space(bp, z, scale);
  };
  auto small_enough = [&](const Eval& e, double scale) {
    return log_space ? std::abs(e.value) <= 1e-14 : std::abs(e.value) <= 1e-13 * scale;
  };

  // Roots beyond the cap are indistinguishable from ±inf in N(.).
  if (evaluate(-kRootCap, nullptr).value > 0.0) return {kInf, 0, true};
  if (evaluate(kRootCap, nullptr).value < 0.0) return {-kInf, 0, true};

  // Start from the linearized boundary Σ a_k (1 + b_k z) = K.
  double z = 0.0;
  {
    double a0 = 0.0;
    double a1 = 0.0;
    for (std::size_t k = 0; k < bp.forward.size(); ++k) {
      const double a = bp.forward[k] * std::exp(-0.5 * bp.vol[k] * bp.vol[k]);
      a0 += a;
      a1 += a * bp.vol[k];
    }
    if (a1 > 0.0) z = std::clamp((strike - a0) / a1, -kRootCap, kRootCap);
  }

  double lo = -kRootCap;
  double hi = kRootCap;
  for (int it = 1; it <= kMaxRootIterations; ++it) {
    double scale = 0.0;
    const Eval e = evaluate(z, &scale);
    if (e.value == 0.0 || small_enough(e, scale)) return {-z, it, true};
    if (e.value < 0.0) {
      lo = z;
    } else {
      hi = z;
    }
    double next = z - e.value / e.slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 1e-15 * (1.0 + std::abs(z))) return {-next, it, true};
    z = next;
  }
  return {-z, kMaxRootIterations, false};
}

double bs_multi_call(const BoundaryProblem& bp, double d) noexcept {
  if (d == -kInf) return 0.0;
  double value = -bp.strike * normal_cdf(d);
  for (std::size_t k = 0; k < bp.forward.size(); ++k)
    value += bp.forward[k] * normal_cdf(d + bp.vol[k]);
  return value;
}

double bs_multi_put(const BoundaryProblem& bp, double d) noexcept {
  if (d == kInf) return 0.0;
  double value = bp.strike * normal_cdf(-d);
  for (std::size_t k = 0; k < bp.forward.size(); ++k)
    value -= bp.forward[k] * normal_cdf(-d - bp.vol[k]);
  return value;
}

Vector coefficient_f(const FactorMatrix& v, std::span<const double> zdot) {
  if (zdot.size() != v.factors())
    throw Error(ErrorCode::InvalidArgument, "zdot length must match the factor count");
  if (zdot.empty() || zdot[0] != 0.0)
    throw Error(ErrorCode::InvalidArgument, "zdot must have a zero first coordinate");
  Vector f(v.assets());
  for (std::size_t k = 0; k < v.assets(); ++k) {
    double half_var = 0.0;
    double s = 0.0;
    for (std::size_t j = 1; j < v.factors(); ++j) {
      half_var += 0.5 * v.v(k, j) * v.v(k, j);
      s += v.v(k, j) * zdot[j];
    }
    f[k] = std::exp(s - half_var);
  }
  return f;
}

namespace {

constexpr std::size_t kChunk = 2048;

// Partial sums for one chunk of nodes, all strikes.
struct Partial {
  std::vector<double> call, put, binary, delta, fbar;
  std::vector<std::size_t> failures;

  Partial(std::size_t strikes, std::size_t assets)
      : call(strikes), put(strikes), binary(strikes), delta(strikes * assets), fbar(assets),
        failures(strikes) {}

  void clear() {
    std::fill(call.begin(), call.end(), 0.0);
    std::fill(put.begin(), put.end(), 0.0);
    std::fill(binary.begin(), binary.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(fbar.begin(), fbar.end(), 0.0);
    std::fill(failures.begin(), failures.end(), std::size_t{0});
  }

  void add(const Partial& o) {
    for (std::size_t i = 0; i < call.size(); ++i) {
      call[i] += o.call[i];
      put[i] += o.put[i];
      binary[i] += o.binary[i];
      failures[i] += o.failures[i];
    }
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] += o.delta[i];
    for (std::size_t i = 0; i < fbar.size(); ++i) fbar[i] += o.fbar[i];
  }
};

struct NodeEvaluator {
  const FactorMatrix& v;
  const QuadratureGrid& grid;
  std::span<const double> weighted_forward;  // w_k F_k
  std::span<const double> half_var;
  std::span<const double> first;  // V_k1
  std::span<const double> strikes;

  void run(std::size_t begin, std::size_t end, Partial& out) const {
    const std::size_t n = v.assets();
    const std::size_t dims = grid.dims();
    std::vector<double> coords(dims);
    std::vector<double> f(n);
    std::vector<double> fwd(n);
    for (std::size_t m = begin; m < end; ++m) {
      const double h = grid.point(m, coords);
      for (std::size_t k = 0; k < n; ++k) {
        double s = -half_var[k];
        const auto row = v.v.row(k);
        for (std::size_t j = 0; j < dims; ++j) s += row[j + 1] * coords[j];
        f[k] = std::exp(s);
        fwd[k] = weighted_forward[k] * f[k];
        out.fbar[k] += h * f[k];
      }
      for (std::size_t i = 0; i < strikes.size(); ++i) {
        const BoundaryProblem bp{fwd, first, strikes[i]};
        const BoundarySolution sol = solve_boundary(bp);
        if (!sol.converged) ++out.failures[i];
        out.call[i] += h * bs_multi_call(bp, sol.d);
        out.put[i] += h * bs_multi_put(bp, sol.d);
        out.binary[i] += h * normal_cdf(sol.d);
        for (std::size_t k = 0; k < n; ++k)
          out.delta[i * n + k] += h * f[k] * normal_cdf(sol.d + first[k]);
      }
    }
  }
};

}  // namespace

std::vector<PricingResult> price(const PricingProblem& problem, const FactorMatrix& v,
                                 const QuadratureGrid& grid, std::span<const double> strikes,
                                 const KernelOptions& options) {
  const std::size_t n = problem.size();
  if (v.assets() != n) throw Error(ErrorCode::InvalidArgument, "factor matrix rows must match assets");
  if (grid.dims() + 1 != v.factors())
    throw Error(ErrorCode::InvalidArgument, "grid dimensions must match factor columns 2..N'");

  Vector weighted_forward(n), half_var(n), first(n);
  double forward = 0.0;
  bool all_positive = true;
  for (std::size_t k = 0; k < n; ++k) {
    weighted_forward[k] = problem.weights[k] * problem.forwards[k];
    forward += weighted_forward[k];
    all_positive = all_positive && problem.weights[k] > 0.0;
    first[k] = v.v(k, 0);
    double hv = 0.0;
    for (std::size_t j = 1; j < v.factors(); ++j) hv += 0.5 * v.v(k, j) * v.v(k, j);
    half_var[k] = hv;
  }
  Vector effective(strikes.size());
  for (std::size_t i = 0; i < strikes.size(); ++i) effective[i] = problem.effective_strike(strikes[i]);

  const NodeEvaluator eval{v, grid, weighted_forward, half_var, first, effective};
  const std::size_t total = grid.size();
  const std::size_t chunks = (total + kChunk - 1) / kChunk;
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));

  Partial sum(strikes.size(), n);
  if (threads <= 1) {
    Partial part(strikes.size(), n);
    for (std::size_t c = 0; c < chunks; ++c) {
      part.clear();
      eval.run(c * kChunk, std::min(total, (c + 1) * kChunk), part);
      sum.add(part);
    }
  } else {
    // Waves of chunks evaluated concurrently, folded in chunk order.
    const std::size_t wave = static_cast<std::size_t>(threads) * 4;
    std::vector<Partial> parts(wave, Partial(strikes.size(), n));
    for (std::size_t base = 0; base < chunks; base += wave) {
      const std::size_t count = std::min(wave, chunks - base);
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
          parts[i].clear();
          const std::size_t c = base + i;
          eval.run(c * kChunk, std::min(total, (c + 1) * kChunk), parts[i]);
        }
      };
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
      pool.clear();
      for (std::size_t i = 0; i < count; ++i) sum.add(parts[i]);
    }
  }

  std::vector<PricingResult> results(strikes.size());
  for (std::size_t i = 0; i < strikes.size(); ++i) {
    PricingResult& r = results[i];
    r.strike = strikes[i];
    r.grid_size = total;
    r.forward = forward;
    r.discount = problem.discount_factor();
    r.control_variate = options.control_variate;
    r.fbar = sum.fbar;
    r.boundary_failures = sum.failures[i];
    r.deltas.resize(n);
    const double k_eff = effective[i];

    if (all_positive && k_eff <= 0.0) {
      r.call = r.call_cv = forward - k_eff;
      r.put = r.put_cv = 0.0;
      r.binary = 1.0;
      for (std::size_t k = 0; k < n; ++k) r.deltas[k] = problem.weights[k];
      continue;
    }

    r.call = sum.call[i];
    r.put = sum.put[i];
    r.binary = std::clamp(sum.binary[i], 0.0, 1.0);
    double call_adj = 0.0;
    double put_adj = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      r.deltas[k] = problem.weights[k] * sum.delta[i * n + k];
      const double mispricing = problem.forwards[k] * (sum.fbar[k] - 1.0);
      call_adj += r.deltas[k] * mispricing;
      put_adj += (r.deltas[k] - problem.weights[k]) * mispricing;
    }
    r.call_cv = r.call - call_adj;
    r.put_cv = r.put - put_adj;
  }
  return results;
}

PricingResult price(const PricingProblem& problem, const FactorMatrix& v, const QuadratureGrid& grid,
                    double strike, const KernelOptions& options) {
  return price(problem, v, grid, std::span<const double>(&strike, 1), options).front();
}

}  // namespace mbq
