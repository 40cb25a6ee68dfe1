#include "mbq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "mbq/error.hpp"

namespace mbq::oracle {

namespace {

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal(double u) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform on the open interval (0, 1) from the top 53 bits.
double open_uniform(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

bool increasing(const Vector& t) {
  for (std::size_t k = 1; k < t.size(); ++k)
    if (!(t[k] > t[k - 1])) return false;
  return true;
}

// Maps standard normals x to log-price deviations X with Cov(X) = Σ.
class PathMap {
 public:
  explicit PathMap(const PricingProblem& p) : n_(p.size()), vols_(p.vols) {
    brownian_ = p.single_underlying && increasing(p.times);
    if (brownian_) {
      steps_.resize(n_);
      double prev = 0.0;
      for (std::size_t k = 0; k < n_; ++k) {
        steps_[k] = std::sqrt(p.times[k] - prev);
        prev = p.times[k];
      }
    } else {
      chol_ = cholesky(covariance(p));
    }
  }

  void apply(std::span<const double> x, std::span<double> out) const {
    if (brownian_) {
      double w = 0.0;
      for (std::size_t k = 0; k < n_; ++k) {
        w += steps_[k] * x[k];
        out[k] = vols_[k] * w;
      }
      return;
    }
    for (std::size_t k = 0; k < n_; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j <= k; ++j) s += chol_(k, j) * x[j];
      out[k] = s;
    }
  }

 private:
  std::size_t n_;
  Vector vols_;
  bool brownian_ = false;
  Vector steps_;
  Matrix chol_;
};

// Σ_k w_k F_k exp(X_k - Σ_kk / 2) evaluated from precomputed scales.
struct BasketValue {
  Vector scale;  // w_k F_k exp(-Σ_kk / 2)

  explicit BasketValue(const PricingProblem& p) : scale(p.size()) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double var = p.vols[k] * p.vols[k] * p.times[k];
      scale[k] = p.weights[k] * p.forwards[k] * std::exp(-0.5 * var);
    }
  }
};

Vector effective_strikes(const PricingProblem& p) {
  Vector k(p.strikes.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = p.effective_strike(p.strikes[i]);
  return k;
}

struct McBatch {
  Vector call_sum, call_sq, put_sum, put_sq;
  explicit McBatch(std::size_t strikes)
      : call_sum(strikes), call_sq(strikes), put_sum(strikes), put_sq(strikes) {}
};

constexpr std::size_t kPairsPerBatch = 8192;

}  // namespace

Matrix covariance(const PricingProblem& p) {
  const std::size_t n = p.size();
  Matrix s(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      s(k, j) = p.correlation(k, j) * p.vols[k] * p.vols[j] * std::min(p.times[k], p.times[j]);
  return s;
}

std::vector<McEstimate> mc_price(const PricingProblem& problem, std::size_t paths,
                                 std::uint64_t seed, unsigned threads) {
  problem.validate();
  if (paths < kMinPaths)
    throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs at least 10000 paths");
  const std::size_t n = problem.size();
  const std::size_t pairs = paths / 2;
  const std::size_t batches = (pairs + kPairsPerBatch - 1) / kPairsPerBatch;
  const PathMap map(problem);
  const BasketValue basket(problem);
  const Vector strikes = effective_strikes(problem);
  const std::size_t ns = strikes.size();

  auto run_batch = [&](std::size_t b, McBatch& out) {
    std::mt19937_64 gen(splitmix64(seed ^ splitmix64(b)));
    const std::size_t count = std::min(kPairsPerBatch, pairs - b * kPairsPerBatch);
    Vector x(n), dev(n);
    for (std::size_t p = 0; p < count; ++p) {
      for (std::size_t k = 0; k < n; ++k) x[k] = inverse_normal(open_uniform(gen));
      map.apply(x, dev);
      double plus = 0.0;
      double minus = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double e = std::exp(dev[k]);
        plus += basket.scale[k] * e;
        minus += basket.scale[k] / e;
      }
      for (std::size_t i = 0; i < ns; ++i) {
        const double c = 0.5 * (std::max(plus - strikes[i], 0.0) + std::max(minus - strikes[i], 0.0));
        const double q = 0.5 * (std::max(strikes[i] - plus, 0.0) + std::max(strikes[i] - minus, 0.0));
        out.call_sum[i] += c;
        out.call_sq[i] += c * c;
        out.put_sum[i] += q;
        out.put_sq[i] += q * q;
      }
    }
  };

  std::vector<McBatch> results(batches, McBatch(ns));
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, batches));
  if (workers <= 1) {
    for (std::size_t b = 0; b < batches; ++b) run_batch(b, results[b]);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < batches; b += workers) run_batch(b, results[b]);
      });
  }

  std::vector<McEstimate> out(ns);
  const double m = static_cast<double>(pairs);
  for (std::size_t i = 0; i < ns; ++i) {
    double cs = 0.0, cq = 0.0, ps = 0.0, pq = 0.0;
    for (const McBatch& b : results) {
      cs += b.call_sum[i];
      cq += b.call_sq[i];
      ps += b.put_sum[i];
      pq += b.put_sq[i];
    }
    McEstimate& e = out[i];
    e.strike = problem.strikes[i];
    e.call = cs / m;
    e.put = ps / m;
    e.call_stderr = std::sqrt(std::max(cq / m - e.call * e.call, 0.0) / (m - 1.0));
    e.put_stderr = std::sqrt(std::max(pq / m - e.put * e.put, 0.0) / (m - 1.0));
  }
  return out;
}

double margrabe(double f1, double f2, double v1, double v2, double rho, double expiry) {
  const double s = std::sqrt(std::max(v1 * v1 + v2 * v2 - 2.0 * rho * v1 * v2, 0.0) * expiry);
  if (s == 0.0) return std::max(f1 - f2, 0.0);
  const double dp = std::log(f1 / f2) / s + 0.5 * s;
  return f1 * phi_cdf(dp) - f2 * phi_cdf(dp - s);
}

double bsm_single(double forward, double strike, double total_vol) {
  if (strike <= 0.0) return forward - strike;
  if (total_vol <= 0.0) return std::max(forward - strike, 0.0);
  const double dp = std::log(forward / strike) / total_vol + 0.5 * total_vol;
  return forward * phi_cdf(dp) - strike * phi_cdf(dp - total_vol);
}

HermiteRule golub_welsch_hermite(int order) {
  if (order < 1 || order > kMaxFullGridNodes)
    throw Error(ErrorCode::OrderOutOfRange, "full-grid Hermite order must be 1..200");
  const auto n = static_cast<std::size_t>(order);
  // Jacobi matrix of the probabilists' Hermite recurrence: zero diagonal,
  // off-diagonal sqrt(k). Implicit QL with only the first eigenvector row.
  Vector d(n, 0.0), e(n, 0.0), z(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) e[k - 1] = std::sqrt(static_cast<double>(k));
  z[0] = 1.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter > 60) throw Error(ErrorCode::NoConvergence, "Golub-Welsch QL did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::size_t i = m;
        bool underflow = false;
        while (i-- > l) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  HermiteRule rule;
  double total = 0.0;
  for (std::size_t i : idx) {
    rule.nodes.push_back(d[i]);
    rule.weights.push_back(z[i] * z[i]);
    total += z[i] * z[i];
  }
  for (double& w : rule.weights) w /= total;
  // Symmetrize to remove round-off asymmetry.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

std::vector<ReferencePrice> full_grid_price(const PricingProblem& problem, int nodes_per_dim,
                                            const Matrix* factor) {
  problem.validate();
  const std::size_t n = problem.size();
  if (n > 3) throw Error(ErrorCode::InvalidArgument, "full-grid quadrature supports N <= 3");
  const Matrix v = factor ? *factor : cholesky(covariance(problem));
  if (v.rows() != n || v.cols() != n)
    throw Error(ErrorCode::InvalidArgument, "factor must be N x N");
  const HermiteRule rule = golub_welsch_hermite(nodes_per_dim);
  const BasketValue basket(problem);
  const Vector strikes = effective_strikes(problem);
  const auto m = static_cast<std::size_t>(nodes_per_dim);

  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= m;
  Vector call(strikes.size()), put(strikes.size());
  std::vector<std::size_t> digit(n);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rest = p;
    double h = 1.0;
    for (std::size_t j = n; j-- > 0;) {
      digit[j] = rest % m;
      rest /= m;
      h *= rule.weights[digit[j]];
    }
    double value = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double x = 0.0;
      for (std::size_t j = 0; j < n; ++j) x += v(k, j) * rule.nodes[digit[j]];
      value += basket.scale[k] * std::exp(x);
    }
    for (std::size_t i = 0; i < strikes.size(); ++i) {
      call[i] += h * std::max(value - strikes[i], 0.0);
      put[i] += h * std::max(strikes[i] - value, 0.0);
    }
  }
  std::vector<ReferencePrice> out(strikes.size());
  for (std::size_t i = 0; i < strikes.size(); ++i) out[i] = {problem.strikes[i], call[i], put[i]};
  return out;
}

std::vector<ReferencePrice> adaptive_price(const PricingProblem& problem, double tolerance) {
  problem.validate();
  const std::size_t n = problem.size();
  if (n > 2) throw Error(ErrorCode::InvalidArgument, "adaptive quadrature supports N <= 2");
  using boost::math::quadrature::gauss_kronrod;
  constexpr double kRange = 12.0;
  constexpr unsigned kDepth = 15;
  const Matrix c = cholesky(covariance(problem));
  const BasketValue basket(problem);
  const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  auto density = [&](double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); };

  // Along x1 the basket is a1 e^{b1 x1} + a2 e^{b2 x1}: at most one critical
  // point, so at most two payoff kinks. Splitting there leaves smooth pieces.
  auto inner = [&](double x2, double k, bool call) {
    double a[2] = {basket.scale[0], 0.0};
    double b[2] = {c(0, 0), 0.0};
    if (n == 2) {
      a[1] = basket.scale[1] * std::exp(c(1, 1) * x2);
      b[1] = c(1, 0);
    }
    auto value = [&](double x) { return a[0] * std::exp(b[0] * x) + a[1] * std::exp(b[1] * x) - k; };
    std::vector<double> cuts{-kRange, kRange};
    const double r = -(a[1] * b[1]) / (a[0] * b[0]);
    if (a[1] != 0.0 && b[0] != b[1] && r > 0.0) {
      const double xc = std::log(r) / (b[0] - b[1]);
      if (xc > -kRange && xc < kRange) cuts.push_back(xc);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double lo = cuts[i];
      double hi = cuts[i + 1];
      const bool positive_lo = value(lo) > 0.0;
      if (positive_lo == (value(hi) > 0.0)) continue;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((value(mid) > 0.0) == positive_lo) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    cuts.insert(cuts.end(), roots.begin(), roots.end());
    std::sort(cuts.begin(), cuts.end());
    auto integrand = [&](double x) {
      const double v = value(x);
      return (call ? std::max(v, 0.0) : std::max(-v, 0.0)) * density(x);
    };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      sum += gauss_kronrod<double, 61>::integrate(integrand, cuts[i], cuts[i + 1], kDepth, tolerance);
    return sum;
  };

  std::vector<ReferencePrice> out;
  for (double quoted : problem.strikes) {
    const double k = problem.effective_strike(quoted);
    auto integrate = [&](bool call) {
      if (n == 1) return inner(0.0, k, call);
      return gauss_kronrod<double, 61>::integrate(
          [&](double x2) { return density(x2) * inner(x2, k, call); }, -kRange, kRange, kDepth,
          tolerance);
    };
    out.push_back({quoted, integrate(true), integrate(false)});
  }
  return out;
}

}  // namespace mbq::oracle
