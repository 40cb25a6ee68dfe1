#pragma once

#include <string>
#include <vector>

#include "mbq/engine.hpp"
#include "mbq/factor.hpp"

namespace mbq {

/// Bordered factor display:
///
///   gᵀV1 | |V_1| ... |V_N| | ‖V‖_F
///   g_k  |  V_k1 ...  V_kN | |row_k|
///        |   ·    M_2 ... M_N | M
///
/// sizes holds M_j for j = 2..N (missing entries print as 1) and the corner
/// M is their product.
std::string factor_display(const FactorMatrix& v, const ForwardWeights& weights,
                           const std::vector<int>& sizes, int decimals = 3);

/// Display of the full factor matrix with the node sizes chosen by config.
std::string factor_display(const PricingPlan& plan, int decimals = 3);

}  // namespace mbq
