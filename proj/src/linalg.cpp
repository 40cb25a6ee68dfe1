#include "mbq/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mbq/error.hpp"

namespace mbq {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::InvalidCorrelation: return "InvalidCorrelation";
    case ErrorCode::NonIncreasingTimes: return "NonIncreasingTimes";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::Io: return "Io";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
  }
  return "Unknown";
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw Error(ErrorCode::InvalidArgument, "ragged matrix rows");
    std::copy(row.begin(), row.end(), m.row(i++).begin());
  }
  return m;
}

Vector Matrix::column(std::size_t c) const {
  Vector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  assert(values.size() == rows_);
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::InvalidArgument, "matrix shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto orow = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::InvalidArgument, "matrix-vector shape mismatch");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::InvalidArgument, "matrix shape mismatch");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Matrix& a) noexcept { return norm(a.data()); }

Vector forward_substitute(const Matrix& lower, std::span<const double> b) {
  const std::size_t n = lower.rows();
  if (lower.cols() != n || b.size() != n)
    throw Error(ErrorCode::InvalidArgument, "forward_substitute shape mismatch");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= lower(i, j) * x[j];
    x[i] = s / lower(i, i);
  }
  return x;
}

Matrix cholesky(const Matrix& sigma) {
  const std::size_t n = sigma.rows();
  if (sigma.cols() != n) throw Error(ErrorCode::InvalidArgument, "cholesky needs a square matrix");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, sigma(i, i));
  const double threshold = 1e-12 * max_diag;

  Matrix c(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = sigma(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= c(j, k) * c(j, k);
    if (!(pivot > threshold)) {
      std::ostringstream msg;
      msg << "covariance is not positive definite (pivot " << j << " = " << pivot << ")";
      throw Error(ErrorCode::NotPositiveDefinite, msg.str());
    }
    const double cjj = std::sqrt(pivot);
    c(j, j) = cjj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = sigma(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= c(i, k) * c(j, k);
      c(i, j) = s / cjj;
    }
  }
  return c;
}

Matrix householder_to(std::span<const double> q1) {
  const std::size_t n = q1.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "householder_to needs a non-empty vector");
  if (std::abs(norm(q1) - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "householder_to needs a unit vector");

  Vector v(q1.begin(), q1.end());
  v[0] -= 1.0;
  const double len = norm(v);
  if (len < 1e-14) return Matrix::identity(n);
  for (double& x : v) x /= len;

  Matrix r = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) -= 2.0 * v[i] * v[j];
  return r;
}

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kOrthogonalityTol = 1e-14;

// Extends an incomplete orthonormal column set (columns flagged false are
// unset) by Gram-Schmidt against the canonical basis.
void complete_orthonormal(std::vector<Vector>& cols, const std::vector<bool>& valid) {
  const std::size_t m = cols.empty() ? 0 : cols.front().size();
  std::size_t candidate = 0;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (valid[j]) continue;
    for (; candidate < m; ++candidate) {
      Vector e(m, 0.0);
      e[candidate] = 1.0;
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (k == j || (!valid[k] && k > j)) continue;
        const double p = dot(cols[k], e);
        for (std::size_t i = 0; i < m; ++i) e[i] -= p * cols[k][i];
      }
      const double len = norm(e);
      if (len > 1e-8) {
        for (double& x : e) x /= len;
        cols[j] = std::move(e);
        ++candidate;
        break;
      }
    }
  }
}

}  // namespace

SvdResult svd_reduced(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (n > m) throw Error(ErrorCode::InvalidArgument, "svd_reduced expects rows >= cols");
  for (double x : a.data())
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "svd_reduced input not finite");

  // Column-major working copies: w holds the rotated columns of a, acc the
  // accumulated right rotations.
  std::vector<Vector> w(n, Vector(m));
  std::vector<Vector> acc(n, Vector(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) w[j][i] = a(i, j);
    acc[j][j] = 1.0;
  }
  const double fro = frobenius_norm(a);
  const double tiny = (1e-14 * fro) * (1e-14 * fro);

  Vector sq(n);
  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (std::size_t j = 0; j < n; ++j) sq[j] = dot(w[j], w[j]);
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = sq[p];
        const double beta = sq[q];
        const double gamma = dot(w[p], w[q]);
        if (std::abs(gamma) <= kOrthogonalityTol * std::sqrt(alpha * beta) ||
            std::abs(gamma) <= tiny)
          continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        auto rotate = [c, s](Vector& x, Vector& y) {
          for (std::size_t i = 0; i < x.size(); ++i) {
            const double xi = x[i];
            const double yi = y[i];
            x[i] = c * xi - s * yi;
            y[i] = s * xi + c * yi;
          }
        };
        rotate(w[p], w[q]);
        rotate(acc[p], acc[q]);
        sq[p] = alpha - t * gamma;
        sq[q] = beta + t * gamma;
      }
    }
    converged = !rotated;
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "Jacobi SVD exceeded the sweep limit");

  Vector d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = norm(w[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&d](std::size_t x, std::size_t y) { return d[x] > d[y]; });

  std::vector<Vector> ucols(n);
  std::vector<Vector> qcols(n);
  std::vector<bool> valid(n, true);
  Vector dsorted(n);
  const double zero_cut = 1e-300 + 1e-15 * fro;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    dsorted[k] = d[j];
    qcols[k] = acc[j];
    ucols[k] = w[j];
    if (d[j] > zero_cut) {
      for (double& x : ucols[k]) x /= d[j];
    } else {
      dsorted[k] = 0.0;
      valid[k] = false;
    }
  }
  complete_orthonormal(ucols, valid);

  SvdResult out{Matrix(m, n), std::move(dsorted), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (std::abs(ucols[k][i]) > std::abs(ucols[k][imax]) + 1e-12) imax = i;
    const double sign = ucols[k][imax] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < m; ++i) out.u(i, k) = sign * ucols[k][i];
    for (std::size_t i = 0; i < n; ++i) out.q(i, k) = sign * qcols[k][i];
  }
  return out;
}

}  // namespace mbq
