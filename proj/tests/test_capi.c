/* SPDX-License-Identifier: Apache-2.0 */
/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "sdq/sdq.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_null_arguments(void) {
  sdq_scenario* s = NULL;
  EXPECT(sdq_scenario_load(NULL, &s) == SDQ_ERR_ARGUMENT);
  EXPECT(strlen(sdq_last_error()) > 0);
  EXPECT(sdq_scenario_parse("name = x\nhbar_list = 1\n", NULL, NULL) == SDQ_ERR_ARGUMENT);
  EXPECT(sdq_run_suite(NULL, "all", NULL, NULL) == SDQ_ERR_ARGUMENT);
  EXPECT(sdq_report_outcome(NULL, 0, NULL, NULL, NULL, NULL) == SDQ_ERR_ARGUMENT);
  sdq_scenario_free(NULL);
  sdq_report_free(NULL);
  sdq_string_free(NULL);
}

static void test_parse_errors(void) {
  sdq_scenario* s = NULL;
  EXPECT(sdq_scenario_parse("name = x\nhbar_list = -1\n", "inline", &s) == SDQ_ERR_CONFIG);
  EXPECT(s == NULL);
  EXPECT(strstr(sdq_last_error(), "inline:2") != NULL);
  EXPECT(sdq_scenario_load("/nonexistent/file.cfg", &s) != SDQ_OK);
}

static void test_finite_pair_run(void) {
  const char* text =
      "name = fp\nmodel.kind = finite-pair\nmodel.units = 8\nhbar_list = 1\n";
  sdq_scenario* s = NULL;
  EXPECT(sdq_scenario_parse(text, "inline", &s) == SDQ_OK);
  if (!s) return;
  EXPECT(strcmp(sdq_scenario_name(s), "fp") == 0);

  char* ser = NULL;
  EXPECT(sdq_scenario_serialize(s, &ser) == SDQ_OK);
  sdq_scenario* s2 = NULL;
  EXPECT(ser && sdq_scenario_parse(ser, "serialized", &s2) == SDQ_OK);
  sdq_string_free(ser);
  sdq_scenario_free(s2);

  sdq_run_options opt;
  sdq_run_options_init(&opt);
  sdq_report* r = NULL;
  EXPECT(sdq_run_suite(s, "norms", &opt, &r) == SDQ_OK);
  EXPECT(r && sdq_report_passed(r));
  EXPECT(sdq_report_count(r) == 1);
  const char* suite = NULL;
  const char* detail = NULL;
  int passed = 0, skipped = 1;
  EXPECT(sdq_report_outcome(r, 0, &suite, &passed, &skipped, &detail) == SDQ_OK);
  EXPECT(suite && strcmp(suite, "norms") == 0);
  EXPECT(passed == 1 && skipped == 0);
  EXPECT(strncmp(sdq_report_text(r), "PASS [fp] norms", 15) == 0);
  EXPECT(sdq_report_outcome(r, 5, NULL, NULL, NULL, NULL) == SDQ_ERR_DOMAIN);
  sdq_report_free(r);

  EXPECT(sdq_run_suite(s, "unknown-suite", &opt, &r) == SDQ_ERR_CONFIG);
  EXPECT(r == NULL);
  opt.threads = 0;
  EXPECT(sdq_run_suite(s, "norms", &opt, &r) == SDQ_ERR_CONFIG);
  sdq_scenario_free(s);
}

static void test_suite_names(void) {
  EXPECT(sdq_suite_count() == 7);
  EXPECT(strcmp(sdq_suite_name(0), "check-axioms") == 0);
  EXPECT(sdq_suite_name(99) == NULL);
  EXPECT(strlen(sdq_version()) > 0);
}

static void test_kernel_norm(void) {
  /* diag(3, -4i) with weights (1, 0.25): norm max(3, 4 * 0.25) = 3 */
  double k[8] = {3, 0, 0, 0, 0, 0, 0, -4};
  double w[2] = {1, 0.25};
  double out = 0;
  EXPECT(sdq_kernel_norm(k, w, 2, 1, &out) == SDQ_OK);
  EXPECT(fabs(out - 3.0) < 3e-9); /* power iteration tolerance */
  EXPECT(sdq_kernel_norm(k, w, 0, 1, &out) == SDQ_ERR_DOMAIN);
}

int main(void) {
  test_null_arguments();
  test_parse_errors();
  test_finite_pair_run();
  test_suite_names();
  test_kernel_norm();
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return EXIT_FAILURE;
  }
  printf("C API: all checks passed\n");
  return EXIT_SUCCESS;
}
