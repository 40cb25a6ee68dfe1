#include "mbq/mbq.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <new>
#include <string>

#include "mbq/bench.hpp"
#include "mbq/engine.hpp"
#include "mbq/error.hpp"
#include "mbq/oracle.hpp"
#include "mbq/problem_json.hpp"
#include "mbq/report.hpp"

struct mbq_problem {
  mbq::PricingProblem problem;
};

struct mbq_config {
  mbq::PricingConfig config;
};

struct mbq_pricing {
  std::vector<mbq::PricingResult> results;
  std::vector<int> sizes;
};

struct mbq_factors {
  mbq::PricingPlan plan;
  std::string display;
};

struct mbq_report {
  std::string text;
  std::string csv;
  bool passed = true;
  double max_deviation = 0.0;
};

namespace {

thread_local std::string last_error;

mbq_status map_code(mbq::ErrorCode code) {
  using mbq::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return MBQ_ERR_INVALID_ARGUMENT;
    case ErrorCode::NotPositiveDefinite: return MBQ_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::NoConvergence: return MBQ_ERR_NO_CONVERGENCE;
    case ErrorCode::OrderOutOfRange: return MBQ_ERR_ORDER_OUT_OF_RANGE;
    case ErrorCode::GridTooLarge: return MBQ_ERR_GRID_TOO_LARGE;
    case ErrorCode::InvalidCorrelation: return MBQ_ERR_INVALID_CORRELATION;
    case ErrorCode::NonIncreasingTimes: return MBQ_ERR_NON_INCREASING_TIMES;
    case ErrorCode::AllZeroWeights: return MBQ_ERR_ALL_ZERO_WEIGHTS;
    case ErrorCode::Schema: return MBQ_ERR_SCHEMA;
    case ErrorCode::Io: return MBQ_ERR_IO;
    case ErrorCode::UnknownPreset: return MBQ_ERR_UNKNOWN_PRESET;
  }
  return MBQ_ERR_INTERNAL;
}

mbq_status fail(mbq_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
mbq_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return MBQ_OK;
  } catch (const mbq::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MBQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MBQ_ERR_INTERNAL, e.what());
  }
}

mbq_status null_argument(const char* name) {
  return fail(MBQ_ERR_INVALID_ARGUMENT, std::string(name) + " must not be null");
}

const mbq::PricingConfig& config_or_default(const mbq_config* config) {
  static const mbq::PricingConfig defaults;
  return config ? config->config : defaults;
}

mbq_report* make_report(const mbq::bench::SweepTable& table) {
  auto* r = new mbq_report;
  r->text = mbq::bench::to_text(table);
  r->csv = mbq::bench::to_csv(table);
  for (const auto& row : table.rows) r->max_deviation = std::max(r->max_deviation, std::abs(row.deviation));
  return r;
}

}  // namespace

extern "C" {

MBQ_API const char* mbq_last_error(void) { return last_error.c_str(); }

MBQ_API const char* mbq_status_string(mbq_status status) {
  switch (status) {
    case MBQ_OK: return "ok";
    case MBQ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MBQ_ERR_NOT_POSITIVE_DEFINITE: return "covariance not positive definite";
    case MBQ_ERR_NO_CONVERGENCE: return "no convergence";
    case MBQ_ERR_ORDER_OUT_OF_RANGE: return "quadrature order out of range";
    case MBQ_ERR_GRID_TOO_LARGE: return "quadrature grid too large";
    case MBQ_ERR_INVALID_CORRELATION: return "invalid correlation";
    case MBQ_ERR_NON_INCREASING_TIMES: return "observation times not increasing";
    case MBQ_ERR_ALL_ZERO_WEIGHTS: return "all weights zero";
    case MBQ_ERR_SCHEMA: return "schema violation";
    case MBQ_ERR_IO: return "i/o error";
    case MBQ_ERR_UNKNOWN_PRESET: return "unknown preset";
    case MBQ_ERR_OUT_OF_RANGE: return "index out of range";
    case MBQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

MBQ_API mbq_status mbq_problem_from_json(const char* text, mbq_problem** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new mbq_problem{mbq::problem_from_json(text)}; });
}

MBQ_API mbq_status mbq_problem_from_file(const char* path, mbq_problem** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new mbq_problem{mbq::problem_from_file(path)}; });
}

MBQ_API void mbq_problem_free(mbq_problem* problem) { delete problem; }

MBQ_API size_t mbq_problem_assets(const mbq_problem* problem) {
  return problem ? problem->problem.size() : 0;
}

MBQ_API size_t mbq_problem_strike_count(const mbq_problem* problem) {
  return problem ? problem->problem.strikes.size() : 0;
}

MBQ_API double mbq_problem_discount_factor(const mbq_problem* problem) {
  return problem ? problem->problem.discount_factor() : 1.0;
}

MBQ_API mbq_status mbq_config_new(mbq_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new mbq_config; });
}

MBQ_API void mbq_config_free(mbq_config* config) { delete config; }

MBQ_API mbq_status mbq_config_set_lambda(mbq_config* config, double lambda) {
  if (!config) return null_argument("config");
  if (!(lambda > 0.0)) return fail(MBQ_ERR_INVALID_ARGUMENT, "lambda must be positive");
  config->config.lambda = lambda;
  last_error.clear();
  return MBQ_OK;
}

MBQ_API mbq_status mbq_config_set_nodes(mbq_config* config, int factor, int count) {
  if (!config) return null_argument("config");
  if (factor < 2) return fail(MBQ_ERR_INVALID_ARGUMENT, "node overrides apply to factors j >= 2");
  if (count < 1 || count > mbq::kMaxHermiteOrder)
    return fail(MBQ_ERR_ORDER_OUT_OF_RANGE, "node count must be 1..64");
  auto& overrides = config->config.node_overrides;
  auto it = std::find_if(overrides.begin(), overrides.end(),
                         [&](const auto& o) { return o.first == factor; });
  if (it != overrides.end()) {
    it->second = count;
  } else {
    overrides.emplace_back(factor, count);
  }
  last_error.clear();
  return MBQ_OK;
}

MBQ_API mbq_status mbq_config_set_keep(mbq_config* config, size_t factors) {
  if (!config) return null_argument("config");
  if (factors < 1) return fail(MBQ_ERR_INVALID_ARGUMENT, "keep must be at least 1");
  config->config.keep = factors;
  last_error.clear();
  return MBQ_OK;
}

MBQ_API mbq_status mbq_config_set_control_variate(mbq_config* config, int enabled) {
  if (!config) return null_argument("config");
  config->config.control_variate = enabled != 0;
  last_error.clear();
  return MBQ_OK;
}

MBQ_API mbq_status mbq_config_set_threads(mbq_config* config, unsigned threads) {
  if (!config) return null_argument("config");
  config->config.threads = threads;
  last_error.clear();
  return MBQ_OK;
}

MBQ_API mbq_status mbq_price(const mbq_problem* problem, const mbq_config* config,
                             mbq_pricing** out) {
  if (!problem) return null_argument("problem");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const mbq::PricingConfig& cfg = config_or_default(config);
    const mbq::PricingPlan plan = mbq::plan_pricing(problem->problem, cfg);
    auto* p = new mbq_pricing;
    p->results = mbq::price_plan(problem->problem, plan, cfg);
    p->sizes = plan.grid.sizes();
    *out = p;
  });
}

MBQ_API void mbq_pricing_free(mbq_pricing* pricing) { delete pricing; }

MBQ_API size_t mbq_pricing_count(const mbq_pricing* pricing) {
  return pricing ? pricing->results.size() : 0;
}

MBQ_API size_t mbq_pricing_assets(const mbq_pricing* pricing) {
  return pricing && !pricing->results.empty() ? pricing->results.front().deltas.size() : 0;
}

MBQ_API mbq_status mbq_pricing_row(const mbq_pricing* pricing, size_t index, mbq_price_row* out) {
  if (!pricing) return null_argument("pricing");
  if (!out) return null_argument("out");
  if (index >= pricing->results.size()) return fail(MBQ_ERR_OUT_OF_RANGE, "row index out of range");
  const mbq::PricingResult& r = pricing->results[index];
  *out = mbq_price_row{r.strike,  r.call_value(), r.put_value(), r.binary,    r.call,
                       r.put,     r.call_cv,      r.put_cv,      r.forward,   r.discount,
                       r.grid_size, r.boundary_failures};
  last_error.clear();
  return MBQ_OK;
}

MBQ_API mbq_status mbq_pricing_deltas(const mbq_pricing* pricing, size_t index, double* out,
                                      size_t capacity) {
  if (!pricing) return null_argument("pricing");
  if (!out) return null_argument("out");
  if (index >= pricing->results.size()) return fail(MBQ_ERR_OUT_OF_RANGE, "row index out of range");
  const auto& d = pricing->results[index].deltas;
  if (capacity < d.size()) return fail(MBQ_ERR_OUT_OF_RANGE, "delta buffer too small");
  std::copy(d.begin(), d.end(), out);
  last_error.clear();
  return MBQ_OK;
}

MBQ_API mbq_status mbq_pricing_grid_sizes(const mbq_pricing* pricing, int* out, size_t capacity,
                                          size_t* count) {
  if (!pricing) return null_argument("pricing");
  if (!count) return null_argument("count");
  *count = pricing->sizes.size();
  if (out) {
    if (capacity < pricing->sizes.size()) return fail(MBQ_ERR_OUT_OF_RANGE, "size buffer too small");
    std::copy(pricing->sizes.begin(), pricing->sizes.end(), out);
  }
  last_error.clear();
  return MBQ_OK;
}

MBQ_API mbq_status mbq_factors_compute(const mbq_problem* problem, const mbq_config* config,
                                       mbq_factors** out) {
  if (!problem) return null_argument("problem");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new mbq_factors{mbq::plan_pricing(problem->problem, config_or_default(config)), {}};
  });
}

MBQ_API void mbq_factors_free(mbq_factors* factors) { delete factors; }

MBQ_API size_t mbq_factors_rows(const mbq_factors* factors) {
  return factors ? factors->plan.full.assets() : 0;
}

MBQ_API size_t mbq_factors_cols(const mbq_factors* factors) {
  return factors ? factors->plan.full.factors() : 0;
}

MBQ_API double mbq_factors_entry(const mbq_factors* factors, size_t row, size_t col) {
  if (!factors || row >= factors->plan.full.assets() || col >= factors->plan.full.factors())
    return 0.0;
  return factors->plan.full.v(row, col);
}

MBQ_API double mbq_factors_weight(const mbq_factors* factors, size_t row) {
  if (!factors || row >= factors->plan.weights.g.size()) return 0.0;
  return factors->plan.weights.g[row];
}

MBQ_API int mbq_factors_adjusted(const mbq_factors* factors) {
  return factors && factors->plan.full.adjusted ? 1 : 0;
}

MBQ_API const char* mbq_factors_display(mbq_factors* factors, int decimals) {
  if (!factors) return "";
  factors->display = mbq::factor_display(factors->plan, decimals);
  return factors->display.c_str();
}

MBQ_API mbq_status mbq_bench_run(const char* preset, const char* mode, mbq_report** out) {
  if (!preset) return null_argument("preset");
  if (!mode) return null_argument("mode");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto table = mbq::bench::run_preset(preset, mbq::bench::parse_mode(mode));
    auto* r = new mbq_report;
    r->text = mbq::bench::to_text(table);
    r->csv = mbq::bench::to_csv(table);
    r->passed = table.passed();
    r->max_deviation = table.max_abs_deviation();
    *out = r;
  });
}

MBQ_API mbq_status mbq_sweep_lambdas(const char* preset, const double* lambdas, size_t count,
                                     int control_variate, mbq_report** out) {
  if (!preset) return null_argument("preset");
  if (!lambdas && count) return null_argument("lambdas");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const std::vector<double> l(lambdas, lambdas + count);
    for (double x : l)
      if (!(x > 0.0)) throw mbq::Error(mbq::ErrorCode::InvalidArgument, "lambda must be positive");
    *out = make_report(
        mbq::bench::convergence_sweep(preset, mbq::bench::lambda_settings(l, control_variate != 0)));
  });
}

MBQ_API mbq_status mbq_sweep_nodes(const char* preset, const int* nodes, size_t count, size_t dims,
                                   int control_variate, mbq_report** out) {
  if (!preset) return null_argument("preset");
  if (!nodes && count) return null_argument("nodes");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    std::vector<std::vector<int>> sets;
    for (size_t i = 0; i < count; ++i) sets.emplace_back(nodes + i * dims, nodes + (i + 1) * dims);
    *out = make_report(
        mbq::bench::convergence_sweep(preset, mbq::bench::node_settings(sets, control_variate != 0)));
  });
}

MBQ_API void mbq_report_free(mbq_report* report) { delete report; }

MBQ_API const char* mbq_report_text(const mbq_report* report) {
  return report ? report->text.c_str() : "";
}

MBQ_API const char* mbq_report_csv(const mbq_report* report) {
  return report ? report->csv.c_str() : "";
}

MBQ_API int mbq_report_passed(const mbq_report* report) { return report && report->passed ? 1 : 0; }

MBQ_API double mbq_report_max_deviation(const mbq_report* report) {
  return report ? report->max_deviation : 0.0;
}

MBQ_API mbq_status mbq_mc_price(const mbq_problem* problem, size_t paths, uint64_t seed,
                                unsigned threads, mbq_mc_row* out, size_t capacity) {
  if (!problem) return null_argument("problem");
  if (!out) return null_argument("out");
  if (capacity < problem->problem.strikes.size())
    return fail(MBQ_ERR_OUT_OF_RANGE, "result buffer smaller than the strike count");
  return guarded([&] {
    const auto est = mbq::oracle::mc_price(problem->problem, paths, seed, threads);
    for (size_t i = 0; i < est.size(); ++i)
      out[i] = mbq_mc_row{est[i].strike, est[i].call, est[i].call_stderr, est[i].put,
                          est[i].put_stderr};
  });
}

}  // extern "C"
