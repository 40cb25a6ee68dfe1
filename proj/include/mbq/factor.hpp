#pragma once

#include <cstddef>
#include <span>

#include "mbq/linalg.hpp"
#include "mbq/problem.hpp"

namespace mbq {

/// Covariance of log observations: Σ_kj = ρ_kj σ_k σ_j min(t_k, t_j).
struct CovarianceMatrix {
  Matrix entries;
  std::size_t size() const noexcept { return entries.rows(); }
};

/// Normalized forward-adjusted weights g ∝ w_k F_k.
struct ForwardWeights {
  Vector g;
  Vector raw;  // w_k F_k
};

/// Square-root factor matrix V (assets x factors).
///
/// Column 1 is the analytically integrated factor; columns 2..N' are mutually
/// orthogonal with non-increasing norms. After `reduce`, residual_variance
/// holds the per-asset variance carried by the dropped columns.
struct FactorMatrix {
  Matrix v;
  Vector q1;
  Matrix rotation;  // full Q with V = C Q before truncation
  double mu = 1.0;
  bool adjusted = false;
  Vector residual_variance;

  std::size_t assets() const noexcept { return v.rows(); }
  std::size_t factors() const noexcept { return v.cols(); }
};

struct FirstFactor {
  Vector v1;
  Vector q1;
  double mu = 1.0;
  bool adjusted = false;
};

CovarianceMatrix build_covariance(const PricingProblem& problem);

/// Closed-form Cholesky factor of a single Brownian motion sampled at
/// 0 < t_1 < ... < t_N: C_kj = σ sqrt(t_j - t_{j-1}) for k >= j.
Matrix asian_cholesky(double vol, std::span<const double> times);

ForwardWeights forward_weights(const PricingProblem& problem);

/// Optimal first factor V1 = Σg / sqrt(gᵀΣg), pushed into the region
/// w_k V_k1 > 0 where needed. Entries violating the sign constraint are
/// replaced by ε sign(w_k) sqrt(Σ_kk); the column is then rescaled through
/// Q1 = normalize(C⁻¹ V1) and V1 = C Q1, which keeps V Vᵀ = Σ exact.
/// The sign of w_k is read from g_k.
FirstFactor first_factor(const CovarianceMatrix& sigma, const Matrix& chol,
                         const ForwardWeights& weights, double epsilon);

/// V = (C q1 | U̇ Ḋ) from the Householder reflection mapping e1 to q1 and the
/// thin SVD of the remaining reflected columns.
FactorMatrix assemble_factor_matrix(const Matrix& chol, std::span<const double> q1);

/// Full pipeline: covariance, Cholesky (closed form for Asian problems),
/// forward weights, first factor and assembly.
FactorMatrix build_factor_matrix(const PricingProblem& problem);

/// Keeps the first `keep` columns and records the dropped variance per row.
FactorMatrix reduce(const FactorMatrix& v, std::size_t keep);

/// Σ_{j<=keep} |V_j|² / ‖V‖_F².
double explained_variance(const FactorMatrix& v, std::size_t keep);

/// Karhunen-Loeve factor j of standard Brownian motion on [0, 1].
double kl_factor(int j, double t);

/// Continuum limit of the first factor for a uniformly weighted average of
/// standard Brownian motion on [0, 1]: sqrt(3) (t - t²/2).
double continuous_first_factor(double t);

}  // namespace mbq
