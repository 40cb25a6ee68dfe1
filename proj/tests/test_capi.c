/* Exercises the shared library through its C interface only. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "mbq/mbq.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static const char* kS1 =
    "{\"type\": \"spread\", \"spots\": [100, 96], \"dividends\": [0.05, 0.05], \"rate\": 0.1,"
    " \"vols\": [0.2, 0.1], \"correlation\": 0.5, \"expiry\": 1.0, \"weights\": [1, -1],"
    " \"strikes\": [0, 2, 4]}";

int main(void) {
  mbq_problem* problem = NULL;
  EXPECT(mbq_problem_from_json(kS1, &problem) == MBQ_OK);
  EXPECT(mbq_problem_assets(problem) == 2);
  EXPECT(mbq_problem_strike_count(problem) == 3);
  EXPECT(fabs(mbq_problem_discount_factor(problem) - exp(-0.1)) < 1e-15);

  mbq_config* config = NULL;
  EXPECT(mbq_config_new(&config) == MBQ_OK);
  EXPECT(mbq_config_set_lambda(config, 9.0) == MBQ_OK);
  EXPECT(mbq_config_set_lambda(config, -1.0) == MBQ_ERR_INVALID_ARGUMENT);

  mbq_pricing* pricing = NULL;
  EXPECT(mbq_price(problem, config, &pricing) == MBQ_OK);
  EXPECT(mbq_pricing_count(pricing) == 3);
  mbq_price_row row;
  EXPECT(mbq_pricing_row(pricing, 0, &row) == MBQ_OK);
  EXPECT(fabs(row.call * row.discount - 8.5132252) < 1e-7);
  EXPECT(fabs(row.call - row.put - (row.forward - row.strike)) < 1e-12);
  EXPECT(row.boundary_failures == 0);
  EXPECT(mbq_pricing_row(pricing, 3, &row) == MBQ_ERR_OUT_OF_RANGE);
  double deltas[2];
  EXPECT(mbq_pricing_deltas(pricing, 1, deltas, 2) == MBQ_OK);
  EXPECT(deltas[0] > 0.0 && deltas[1] < 0.0);

  mbq_factors* factors = NULL;
  EXPECT(mbq_factors_compute(problem, config, &factors) == MBQ_OK);
  EXPECT(mbq_factors_rows(factors) == 2);
  EXPECT(mbq_factors_adjusted(factors) == 1);
  const char* display = mbq_factors_display(factors, 3);
  EXPECT(display != NULL && strstr(display, "0.721") != NULL);

  mbq_problem* bad = NULL;
  EXPECT(mbq_problem_from_json("{\"type\": 1}", &bad) == MBQ_ERR_SCHEMA);
  EXPECT(bad == NULL);
  EXPECT(strstr(mbq_last_error(), "$.type") != NULL);
  EXPECT(mbq_problem_from_file("/nonexistent.json", &bad) == MBQ_ERR_IO);
  EXPECT(strcmp(mbq_status_string(MBQ_OK), "") != 0);

  mbq_report* report = NULL;
  EXPECT(mbq_bench_run("S1", "converged", &report) == MBQ_OK);
  EXPECT(mbq_report_passed(report) == 1);
  EXPECT(mbq_report_max_deviation(report) <= 1e-7);
  EXPECT(strncmp(mbq_report_csv(report), "case,K,price", 12) == 0);
  mbq_report_free(report);
  EXPECT(mbq_bench_run("Z1", "fast", &report) == MBQ_ERR_UNKNOWN_PRESET);

  mbq_factors_free(factors);
  mbq_pricing_free(pricing);
  mbq_config_free(config);
  mbq_problem_free(problem);
  mbq_problem_free(NULL);

  mbq_problem* b1 = NULL;
  EXPECT(mbq_problem_from_json(
             "{\"type\": \"basket\", \"spots\": [100, 100, 100, 100], \"rate\": 0,"
             " \"vols\": [0.4, 0.4, 0.4, 0.4], \"correlation\": 0.5, \"expiry\": 5,"
             " \"weights\": [0.25, 0.25, 0.25, 0.25], \"strike\": 100}",
             &b1) == MBQ_OK);
  mbq_mc_row mc[1];
  EXPECT(mbq_mc_price(b1, 100000, 7, 1, mc, 1) == MBQ_OK);
  EXPECT(fabs(mc[0].call - 28.0073695) < 3.0 * mc[0].call_stderr);
  EXPECT(mbq_mc_price(b1, 10, 7, 1, mc, 1) != MBQ_OK);
  mbq_problem_free(b1);

  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
