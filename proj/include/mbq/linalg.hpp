#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mbq {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  Vector column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);
Matrix operator-(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm(std::span<const double> a) noexcept;
double frobenius_norm(const Matrix& a) noexcept;

/// Solves L x = b for lower-triangular L.
Vector forward_substitute(const Matrix& lower, std::span<const double> b);

/// Lower-triangular C with C Cᵀ = sigma. Throws NotPositiveDefinite when a
/// pivot drops below 1e-12 times the largest diagonal entry; no jitter is
/// ever added.
Matrix cholesky(const Matrix& sigma);

/// Householder reflection R = I - 2 v vᵀ with v ∝ q1 - e1, so that R e1 = q1.
/// q1 must be a unit vector. When q1 is within 1e-14 of e1 the reflection is
/// degenerate and the identity is returned.
Matrix householder_to(std::span<const double> q1);

struct SvdResult {
  Matrix u;  // m x n, orthonormal columns
  Vector d;  // n singular values, non-increasing
  Matrix q;  // n x n orthonormal
};

/// Thin SVD a = u diag(d) qᵀ of an m x n matrix with m >= n, by one-sided
/// Jacobi sweeps. Each column pair (u_j, q_j) is signed so the largest
/// magnitude entry of u_j is positive. Throws NoConvergence after 60 sweeps.
SvdResult svd_reduced(const Matrix& a);

}  // namespace mbq
