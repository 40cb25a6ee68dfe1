#ifndef MBQ_MBQ_H
#define MBQ_MBQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(MBQ_BUILDING_LIBRARY)
#define MBQ_API __attribute__((visibility("default")))
#else
#define MBQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mbq_status {
  MBQ_OK = 0,
  MBQ_ERR_INVALID_ARGUMENT = 1,
  MBQ_ERR_NOT_POSITIVE_DEFINITE = 2,
  MBQ_ERR_NO_CONVERGENCE = 3,
  MBQ_ERR_ORDER_OUT_OF_RANGE = 4,
  MBQ_ERR_GRID_TOO_LARGE = 5,
  MBQ_ERR_INVALID_CORRELATION = 6,
  MBQ_ERR_NON_INCREASING_TIMES = 7,
  MBQ_ERR_ALL_ZERO_WEIGHTS = 8,
  MBQ_ERR_SCHEMA = 9,
  MBQ_ERR_IO = 10,
  MBQ_ERR_UNKNOWN_PRESET = 11,
  MBQ_ERR_OUT_OF_RANGE = 12,
  MBQ_ERR_INTERNAL = 13
} mbq_status;

/* Message of the last failed call on this thread; empty after success. */
MBQ_API const char* mbq_last_error(void);
MBQ_API const char* mbq_status_string(mbq_status status);

/* Problems */
typedef struct mbq_problem mbq_problem;

MBQ_API mbq_status mbq_problem_from_json(const char* text, mbq_problem** out);
MBQ_API mbq_status mbq_problem_from_file(const char* path, mbq_problem** out);
MBQ_API void mbq_problem_free(mbq_problem* problem);
MBQ_API size_t mbq_problem_assets(const mbq_problem* problem);
MBQ_API size_t mbq_problem_strike_count(const mbq_problem* problem);
MBQ_API double mbq_problem_discount_factor(const mbq_problem* problem);

/* Grid configuration. Defaults: node-size rule with lambda = 3 for spreads
   and baskets, three nodes on factors 2..5 for Asians, control variate on. */
typedef struct mbq_config mbq_config;

MBQ_API mbq_status mbq_config_new(mbq_config** out);
MBQ_API void mbq_config_free(mbq_config* config);
MBQ_API mbq_status mbq_config_set_lambda(mbq_config* config, double lambda);
/* Forces M_j for factor j >= 2. */
MBQ_API mbq_status mbq_config_set_nodes(mbq_config* config, int factor, int count);
MBQ_API mbq_status mbq_config_set_keep(mbq_config* config, size_t factors);
MBQ_API mbq_status mbq_config_set_control_variate(mbq_config* config, int enabled);
MBQ_API mbq_status mbq_config_set_threads(mbq_config* config, unsigned threads);

/* Pricing. Values are forward (undiscounted); multiply by discount. call and
   put honor the control-variate setting; the raw and adjusted sums are also
   reported. */
typedef struct mbq_price_row {
  double strike;
  double call;
  double put;
  double binary;
  double call_raw;
  double put_raw;
  double call_cv;
  double put_cv;
  double forward;
  double discount;
  size_t grid_size;
  size_t boundary_failures;
} mbq_price_row;

typedef struct mbq_pricing mbq_pricing;

MBQ_API mbq_status mbq_price(const mbq_problem* problem, const mbq_config* config,
                             mbq_pricing** out);
MBQ_API void mbq_pricing_free(mbq_pricing* pricing);
MBQ_API size_t mbq_pricing_count(const mbq_pricing* pricing);
MBQ_API size_t mbq_pricing_assets(const mbq_pricing* pricing);
MBQ_API mbq_status mbq_pricing_row(const mbq_pricing* pricing, size_t index, mbq_price_row* out);
/* Forward deltas D_k of row `index`; `out` holds mbq_pricing_assets entries. */
MBQ_API mbq_status mbq_pricing_deltas(const mbq_pricing* pricing, size_t index, double* out,
                                      size_t capacity);
/* Node counts M_j of the integrated factors; *count receives their number. */
MBQ_API mbq_status mbq_pricing_grid_sizes(const mbq_pricing* pricing, int* out, size_t capacity,
                                          size_t* count);

/* Factor matrix */
typedef struct mbq_factors mbq_factors;

MBQ_API mbq_status mbq_factors_compute(const mbq_problem* problem, const mbq_config* config,
                                       mbq_factors** out);
MBQ_API void mbq_factors_free(mbq_factors* factors);
MBQ_API size_t mbq_factors_rows(const mbq_factors* factors);
MBQ_API size_t mbq_factors_cols(const mbq_factors* factors);
MBQ_API double mbq_factors_entry(const mbq_factors* factors, size_t row, size_t col);
MBQ_API double mbq_factors_weight(const mbq_factors* factors, size_t row);
MBQ_API int mbq_factors_adjusted(const mbq_factors* factors);
/* Bordered display; the string lives as long as the handle. */
MBQ_API const char* mbq_factors_display(mbq_factors* factors, int decimals);

/* Benchmark and sweep reports */
typedef struct mbq_report mbq_report;

/* mode is "fast" or "converged". */
MBQ_API mbq_status mbq_bench_run(const char* preset, const char* mode, mbq_report** out);
MBQ_API mbq_status mbq_sweep_lambdas(const char* preset, const double* lambdas, size_t count,
                                     int control_variate, mbq_report** out);
/* nodes is row-major: `count` settings of `dims` node counts each. */
MBQ_API mbq_status mbq_sweep_nodes(const char* preset, const int* nodes, size_t count, size_t dims,
                                   int control_variate, mbq_report** out);
MBQ_API void mbq_report_free(mbq_report* report);
MBQ_API const char* mbq_report_text(const mbq_report* report);
MBQ_API const char* mbq_report_csv(const mbq_report* report);
/* 1 when every row is within tolerance; sweeps always report 1. */
MBQ_API int mbq_report_passed(const mbq_report* report);
MBQ_API double mbq_report_max_deviation(const mbq_report* report);

/* Monte Carlo oracle, forward values per strike. */
typedef struct mbq_mc_row {
  double strike;
  double call;
  double call_stderr;
  double put;
  double put_stderr;
} mbq_mc_row;

MBQ_API mbq_status mbq_mc_price(const mbq_problem* problem, size_t paths, uint64_t seed,
                                unsigned threads, mbq_mc_row* out, size_t capacity);

#ifdef __cplusplus
}
#endif

#endif
