#include "mbq/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "mbq/error.hpp"

namespace mbq {

namespace {

// Newton iteration on the orthonormal physicists' Hermite polynomials with
// the usual asymptotic starting guesses, then mapped to the standard normal
// weight via z = x sqrt(2), w / sqrt(pi).
GaussHermiteRule build_rule(int n) {
  constexpr double kPiToMinusQuarter = 0.7511255444649425;
  constexpr int kMaxIter = 100;
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double deriv = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      double p1 = kPiToMinusQuarter;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      deriv = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / deriv;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    if (2 * i + 1 == n) z = 0.0;
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (deriv * deriv);
  }
  // The last refinement can leave the middle node at 1e-17 instead of 0.
  if (n % 2 == 1) x[n / 2] = 0.0;

  GaussHermiteRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // x is descending; store ascending.
    rule.nodes[i] = x[n - 1 - i] * std::numbers::sqrt2;
    rule.weights[i] = w[n - 1 - i] / std::sqrt(std::numbers::pi);
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int order) {
  if (order < 1 || order > kMaxHermiteOrder)
    throw Error(ErrorCode::OrderOutOfRange,
                "Gauss-Hermite order " + std::to_string(order) + " outside [1, 64]");
  static const std::array<GaussHermiteRule, kMaxHermiteOrder> table = [] {
    std::array<GaussHermiteRule, kMaxHermiteOrder> t;
    for (int n = 1; n <= kMaxHermiteOrder; ++n) t[n - 1] = build_rule(n);
    return t;
  }();
  return table[order - 1];
}

QuadratureGrid::QuadratureGrid(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  double total = 1.0;
  for (int s : sizes_) {
    if (s < 1) throw Error(ErrorCode::InvalidArgument, "grid sizes must be >= 1");
    total *= s;
  }
  if (total > static_cast<double>(kMaxGridSize))
    throw Error(ErrorCode::GridTooLarge,
                "quadrature grid of " + std::to_string(total) + " points exceeds 1e8");
  rules_.reserve(sizes_.size());
  for (int s : sizes_) rules_.push_back(&gauss_hermite(s));
  size_ = static_cast<std::size_t>(total);
}

double QuadratureGrid::point(std::size_t m, std::span<double> coords) const {
  double h = 1.0;
  for (std::size_t d = sizes_.size(); d-- > 0;) {
    const auto n = static_cast<std::size_t>(sizes_[d]);
    const std::size_t i = m % n;
    m /= n;
    coords[d] = rules_[d]->nodes[i];
    h *= rules_[d]->weights[i];
  }
  return h;
}

double QuadratureGrid::weight(std::size_t m) const {
  double h = 1.0;
  for (std::size_t d = sizes_.size(); d-- > 0;) {
    const auto n = static_cast<std::size_t>(sizes_[d]);
    h *= rules_[d]->weights[m % n];
    m /= n;
  }
  return h;
}

QuadratureGrid tensor_grid(std::span<const int> sizes) {
  return QuadratureGrid(std::vector<int>(sizes.begin(), sizes.end()));
}

}  // namespace mbq

namespace mbq {

std::vector<int> node_size_rule(const Matrix& v, std::span<const double> g, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  if (v.rows() != g.size()) throw Error(ErrorCode::InvalidArgument, "g length must match V rows");
  if (v.cols() == 0) return {};
  const double g_v1 = dot(g, v.column(0));
  if (!(g_v1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "gᵀV1 must be positive");

  std::vector<int> sizes;
  sizes.reserve(v.cols() - 1);
  for (std::size_t j = 1; j < v.cols(); ++j) {
    const double ratio = norm(v.column(j)) / g_v1;
    const long m = std::lround(ratio * lambda + 1.0);
    sizes.push_back(static_cast<int>(std::clamp<long>(m, 1, kMaxHermiteOrder)));
  }
  return sizes;
}

}  // namespace mbq
