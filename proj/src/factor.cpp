#include "mbq/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mbq/error.hpp"

namespace mbq {

const char* to_string(ProductKind kind) noexcept {
  switch (kind) {
    case ProductKind::Spread: return "spread";
    case ProductKind::Basket: return "basket";
    case ProductKind::AsianDiscrete: return "asian_discrete";
    case ProductKind::AsianContinuous: return "asian_continuous";
    case ProductKind::Generic: return "generic";
  }
  return "generic";
}

double PricingProblem::discount_factor() const { return std::exp(-rate * expiry); }

void PricingProblem::validate() const {
  const std::size_t n = size();
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (n == 0) fail("problem has no assets");
  if (forwards.size() != n || vols.size() != n || times.size() != n)
    fail("weights, forwards, vols and times must have equal length");
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(weights[k]) || weights[k] == 0.0) fail("weights must be finite and non-zero");
    if (!(forwards[k] > 0.0) || !std::isfinite(forwards[k])) fail("forwards must be positive");
    if (!(vols[k] > 0.0) || !std::isfinite(vols[k])) fail("volatilities must be positive");
    if (!(times[k] > 0.0) || !std::isfinite(times[k])) fail("observation times must be positive");
  }
  if (!(epsilon > 0.0 && epsilon <= 0.1)) fail("epsilon must lie in (0, 0.1]");
  if (correlation.rows() != n || correlation.cols() != n)
    throw Error(ErrorCode::InvalidCorrelation, "correlation must be N x N");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(correlation(i, i) - 1.0) > 1e-12)
      throw Error(ErrorCode::InvalidCorrelation, "correlation diagonal must be 1");
    for (std::size_t j = 0; j < n; ++j) {
      const double r = correlation(i, j);
      if (!std::isfinite(r) || std::abs(r) > 1.0)
        throw Error(ErrorCode::InvalidCorrelation, "correlation entries must lie in [-1, 1]");
      if (std::abs(r - correlation(j, i)) > 1e-12)
        throw Error(ErrorCode::InvalidCorrelation, "correlation must be symmetric");
    }
  }
}

CovarianceMatrix build_covariance(const PricingProblem& problem) {
  problem.validate();
  const std::size_t n = problem.size();
  CovarianceMatrix sigma{Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      sigma.entries(k, j) = problem.correlation(k, j) * problem.vols[k] * problem.vols[j] *
                            std::min(problem.times[k], problem.times[j]);
  return sigma;
}

Matrix asian_cholesky(double vol, std::span<const double> times) {
  if (!(vol > 0.0)) throw Error(ErrorCode::InvalidArgument, "volatility must be positive");
  const std::size_t n = times.size();
  Matrix c(n, n);
  double prev = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!(times[j] > prev))
      throw Error(ErrorCode::NonIncreasingTimes, "observation times must be strictly increasing and positive");
    const double step = vol * std::sqrt(times[j] - prev);
    for (std::size_t k = j; k < n; ++k) c(k, j) = step;
    prev = times[j];
  }
  return c;
}

ForwardWeights forward_weights(const PricingProblem& problem) {
  ForwardWeights out;
  out.raw.resize(problem.size());
  for (std::size_t k = 0; k < problem.size(); ++k)
    out.raw[k] = problem.weights[k] * problem.forwards[k];
  const double len = norm(out.raw);
  if (!(len > 0.0)) throw Error(ErrorCode::AllZeroWeights, "all weights are zero");
  out.g = out.raw;
  for (double& x : out.g) x /= len;
  return out;
}

FirstFactor first_factor(const CovarianceMatrix& sigma, const Matrix& chol,
                         const ForwardWeights& weights, double epsilon) {
  const std::size_t n = sigma.size();
  const Vector& g = weights.g;
  if (g.size() != n || chol.rows() != n)
    throw Error(ErrorCode::InvalidArgument, "first_factor dimension mismatch");
  if (!(epsilon > 0.0 && epsilon <= 0.1))
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 0.1]");

  const Vector sigma_g = sigma.entries * g;
  const double var = dot(g, sigma_g);
  if (!(var > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "gᵀΣg is not positive");
  const double scale = std::sqrt(var);

  FirstFactor out;
  out.v1 = sigma_g;
  for (double& x : out.v1) x /= scale;
  for (std::size_t k = 0; k < n; ++k) {
    if (g[k] * out.v1[k] <= 0.0) {
      out.v1[k] = epsilon * std::copysign(1.0, g[k]) * std::sqrt(sigma.entries(k, k));
      out.adjusted = true;
    }
  }

  if (out.adjusted) {
    out.q1 = forward_substitute(chol, out.v1);
    const double len = norm(out.q1);
    out.mu = 1.0 / len;
    for (double& x : out.q1) x *= out.mu;
  } else {
    out.q1 = chol.transpose() * g;
    for (double& x : out.q1) x /= scale;
    // Cᵀg / sqrt(gᵀΣg) is a unit vector up to round-off.
    const double len = norm(out.q1);
    for (double& x : out.q1) x /= len;
  }
  out.v1 = chol * out.q1;
  return out;
}

FactorMatrix assemble_factor_matrix(const Matrix& chol, std::span<const double> q1) {
  const std::size_t n = chol.rows();
  if (q1.size() != n) throw Error(ErrorCode::InvalidArgument, "q1 length must match C");

  FactorMatrix out;
  out.q1.assign(q1.begin(), q1.end());
  out.residual_variance.assign(n, 0.0);
  if (n == 1) {
    out.v = Matrix(1, 1, chol(0, 0) * q1[0]);
    out.rotation = Matrix(1, 1, q1[0]);
    return out;
  }

  const Matrix reflection = householder_to(q1);
  const Matrix reflected = chol * reflection;
  Matrix rest(n, n - 1);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 1; j < n; ++j) rest(k, j - 1) = reflected(k, j);
  const SvdResult svd = svd_reduced(rest);

  out.v = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.v(k, 0) = reflected(k, 0);
    for (std::size_t j = 1; j < n; ++j) out.v(k, j) = svd.u(k, j - 1) * svd.d[j - 1];
  }

  Matrix block(n, n);
  block(0, 0) = 1.0;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j) block(i, j) = svd.q(i - 1, j - 1);
  out.rotation = reflection * block;
  return out;
}

FactorMatrix build_factor_matrix(const PricingProblem& problem) {
  const CovarianceMatrix sigma = build_covariance(problem);
  const Matrix chol = problem.single_underlying ? asian_cholesky(problem.vols[0], problem.times)
                                                : cholesky(sigma.entries);
  const ForwardWeights weights = forward_weights(problem);
  const FirstFactor first = first_factor(sigma, chol, weights, problem.epsilon);
  FactorMatrix out = assemble_factor_matrix(chol, first.q1);
  out.mu = first.mu;
  out.adjusted = first.adjusted;
  return out;
}

FactorMatrix reduce(const FactorMatrix& v, std::size_t keep) {
  if (keep < 1 || keep > v.factors())
    throw Error(ErrorCode::InvalidArgument, "reduce: keep must lie in [1, factors]");
  FactorMatrix out = v;
  if (keep == v.factors()) return out;
  out.v = Matrix(v.assets(), keep);
  if (out.residual_variance.size() != v.assets()) out.residual_variance.assign(v.assets(), 0.0);
  for (std::size_t k = 0; k < v.assets(); ++k) {
    for (std::size_t j = 0; j < keep; ++j) out.v(k, j) = v.v(k, j);
    for (std::size_t j = keep; j < v.factors(); ++j) out.residual_variance[k] += v.v(k, j) * v.v(k, j);
  }
  return out;
}

double explained_variance(const FactorMatrix& v, std::size_t keep) {
  keep = std::min(keep, v.factors());
  double kept = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < v.assets(); ++k) {
    for (std::size_t j = 0; j < v.factors(); ++j) {
      const double x2 = v.v(k, j) * v.v(k, j);
      total += x2;
      if (j < keep) kept += x2;
    }
    if (k < v.residual_variance.size()) total += v.residual_variance[k];
  }
  return total > 0.0 ? kept / total : 0.0;
}

double kl_factor(int j, double t) {
  if (j < 1) throw Error(ErrorCode::InvalidArgument, "KL factor index starts at 1");
  const double freq = (j - 0.5) * std::numbers::pi;
  return std::numbers::sqrt2 / freq * std::sin(freq * t);
}

double continuous_first_factor(double t) { return std::sqrt(3.0) * (t - 0.5 * t * t); }

}  // namespace mbq
