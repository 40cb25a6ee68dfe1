#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbq/engine.hpp"
#include "mbq/problem.hpp"

namespace mbq::bench {

enum class Mode { Fast, Converged };

const char* to_string(Mode mode) noexcept;
Mode parse_mode(std::string_view text);

inline constexpr const char* kPresetNames[] = {"S1", "S2", "B1", "B2", "A1", "A2", "A3"};

/// One published pricing problem: a table row group sharing V and the grid.
struct BenchCase {
  std::string table;  // published table the references come from
  std::string id;
  PricingProblem problem;
  Vector references;  // per strike, present values
  Vector published;   // the method's own published prices, when the table has them
  std::vector<int> published_sizes;  // fast-mode M_j, when published
};

/// All cases of a preset (S1, S2, B1, B2, A1, A2, A3). Throws UnknownPreset.
std::vector<BenchCase> preset_cases(std::string_view preset);

/// Grid settings used to reproduce the preset's tables in the given mode.
PricingConfig preset_config(std::string_view preset, Mode mode);

struct Tolerance {
  double reference = 0.0;                // |price - reference|
  std::optional<double> published;       // |price - published method price|
};

Tolerance preset_tolerance(std::string_view preset, Mode mode);

struct BenchRow {
  std::string table;
  std::string id;
  double strike = 0.0;
  double price = 0.0;  // present value
  double reference = 0.0;
  double deviation = 0.0;
  std::optional<double> published;
  std::vector<int> sizes;  // M_j actually integrated
  std::size_t grid_size = 0;
  double seconds = 0.0;
  bool sizes_match = true;  // against published_sizes, when present
  bool pass = false;
};

struct BenchTable {
  std::string preset;
  Mode mode = Mode::Fast;
  Tolerance tolerance;
  std::vector<BenchRow> rows;

  bool passed() const noexcept;
  double max_abs_deviation() const noexcept;
};

BenchTable run_preset(std::string_view preset, Mode mode);

/// One grid setting of a convergence sweep.
struct SweepSetting {
  std::string label;
  PricingConfig config;
};

std::vector<SweepSetting> lambda_settings(const std::vector<double>& lambdas, bool control_variate);
std::vector<SweepSetting> node_settings(const std::vector<std::vector<int>>& nodes,
                                        bool control_variate);

struct SweepRow {
  std::string id;
  std::string setting;
  double strike = 0.0;
  double price = 0.0;
  double reference = 0.0;
  double deviation = 0.0;
  std::size_t grid_size = 0;
  double seconds = 0.0;
};

struct SweepTable {
  std::string preset;
  std::vector<SweepRow> rows;
};

SweepTable convergence_sweep(std::string_view preset, const std::vector<SweepSetting>& settings);

// Aligned text and CSV (case id, K, price, reference, deviation, M, seconds).
std::string to_text(const BenchTable& table);
std::string to_csv(const BenchTable& table);
std::string to_text(const SweepTable& table);
std::string to_csv(const SweepTable& table);

}  // namespace mbq::bench
