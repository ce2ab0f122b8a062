/* SPDX-License-Identifier: Apache-2.0 */
#ifndef SDQ_SDQ_H
#define SDQ_SDQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(SDQ_BUILDING_LIBRARY)
#define SDQ_API __attribute__((visibility("default")))
#else
#define SDQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdq_status {
  SDQ_OK = 0,
  SDQ_FAILED = 1,          /* a numerical criterion did not hold */
  SDQ_ERR_CONFIG = 2,      /* malformed or inconsistent scenario */
  SDQ_ERR_DOMAIN = 3,      /* argument outside the domain of a routine */
  SDQ_ERR_NUMERIC = 4,     /* aliasing, divergence, support escape, ... */
  SDQ_ERR_IO = 5,
  SDQ_ERR_UNSUPPORTED = 6,
  SDQ_ERR_INTERNAL = 7,
  SDQ_ERR_ARGUMENT = 8     /* null handle or pointer */
} sdq_status;

typedef struct sdq_scenario sdq_scenario;
typedef struct sdq_report sdq_report;

typedef struct sdq_run_options {
  uint64_t seed;
  int has_seed;       /* 0: use the scenario seed */
  int threads;        /* >= 1 */
  double tol_scale;   /* > 0, scales absolute tolerances */
  const char* out_dir; /* NULL or "": write nothing */
} sdq_run_options;

SDQ_API const char* sdq_version(void);
/* Message of the last failing call on this thread; never NULL. */
SDQ_API const char* sdq_last_error(void);
SDQ_API void sdq_run_options_init(sdq_run_options* opt);

SDQ_API sdq_status sdq_scenario_load(const char* path, sdq_scenario** out);
SDQ_API sdq_status sdq_scenario_parse(const char* text, const char* source, sdq_scenario** out);
SDQ_API void sdq_scenario_free(sdq_scenario* s);
SDQ_API const char* sdq_scenario_name(const sdq_scenario* s);
/* Caller releases *out with sdq_string_free. */
SDQ_API sdq_status sdq_scenario_serialize(const sdq_scenario* s, char** out);
SDQ_API void sdq_string_free(char* s);

SDQ_API size_t sdq_suite_count(void);
SDQ_API const char* sdq_suite_name(size_t i);

/* Runs a suite ("all" for every suite).  SDQ_OK and SDQ_FAILED both produce a report. */
SDQ_API sdq_status sdq_run_suite(const sdq_scenario* s, const char* suite, const sdq_run_options* opt,
                                 sdq_report** out);
SDQ_API const char* sdq_report_text(const sdq_report* r);
SDQ_API int sdq_report_passed(const sdq_report* r);
SDQ_API size_t sdq_report_count(const sdq_report* r);
/* Any output pointer may be NULL.  Strings live as long as the report. */
SDQ_API sdq_status sdq_report_outcome(const sdq_report* r, size_t i, const char** suite, int* passed,
                                      int* skipped, const char** detail);
SDQ_API void sdq_report_free(sdq_report* r);

/* Reduced norm of a dense n x n kernel (row-major, interleaved re/im) with unit weights w. */
SDQ_API sdq_status sdq_kernel_norm(const double* kernel, const double* weights, int n, uint64_t seed, double* out);

#ifdef __cplusplus
}
#endif

#endif
