#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mbq/linalg.hpp"

namespace mbq {

inline constexpr int kMaxHermiteOrder = 64;
inline constexpr std::size_t kMaxGridSize = 100'000'000;

/// Gauss-Hermite rule for the standard normal density: nodes in standard
/// normal units, ascending; weights positive and summing to one.
struct GaussHermiteRule {
  int order = 0;
  Vector nodes;
  Vector weights;
};

/// Returns the cached rule of the given order (1..64). Throws OrderOutOfRange.
const GaussHermiteRule& gauss_hermite(int order);

/// Tensor product of Gauss-Hermite rules over factor dimensions 2..N'.
///
/// Points are enumerated lexicographically: the first listed dimension varies
/// slowest. Point coordinates exclude the analytically integrated first
/// factor, whose coordinate is fixed at zero.
class QuadratureGrid {
 public:
  QuadratureGrid() = default;
  explicit QuadratureGrid(std::vector<int> sizes);

  std::size_t dims() const noexcept { return sizes_.size(); }
  const std::vector<int>& sizes() const noexcept { return sizes_; }
  std::size_t size() const noexcept { return size_; }

  /// Writes the coordinates of point m (length dims()) and returns its weight.
  double point(std::size_t m, std::span<double> coords) const;
  double weight(std::size_t m) const;

  const GaussHermiteRule& rule(std::size_t dim) const { return *rules_[dim]; }

 private:
  std::vector<int> sizes_;
  std::vector<const GaussHermiteRule*> rules_;
  std::size_t size_ = 1;
};

/// Builds the grid, throwing GridTooLarge when the product exceeds 1e8.
QuadratureGrid tensor_grid(std::span<const int> sizes);

/// Node counts for factor columns 2..N of v:
///   M_j = round(|V_j| / |gᵀV_1| * lambda + 1).
/// A count of 1 marks a dimension that should be truncated rather than
/// integrated. Counts are capped at kMaxHermiteOrder.
std::vector<int> node_size_rule(const Matrix& v, std::span<const double> g, double lambda);

}  // namespace mbq
