// SPDX-License-Identifier: Apache-2.0
#include "sdq/sdq.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "sdq/suites.hpp"

struct sdq_scenario {
  sdq::ScenarioConfig cfg;
};

struct sdq_report {
  sdq::SuiteReport rep;
  std::string text;
};

namespace {

thread_local std::string g_last_error;

sdq_status status_of(sdq::ErrorCode c) {
  using sdq::ErrorCode;
  switch (c) {
    case ErrorCode::config: return SDQ_ERR_CONFIG;
    case ErrorCode::domain: return SDQ_ERR_DOMAIN;
    case ErrorCode::io: return SDQ_ERR_IO;
    case ErrorCode::unsupported: return SDQ_ERR_UNSUPPORTED;
    default: return SDQ_ERR_NUMERIC;
  }
}

template <class F>
sdq_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const sdq::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SDQ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SDQ_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return SDQ_ERR_INTERNAL;
  }
}

sdq_status bad_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return SDQ_ERR_ARGUMENT;
}

}  // namespace

extern "C" {

const char* sdq_version(void) { return "1.0.0"; }

const char* sdq_last_error(void) { return g_last_error.c_str(); }

void sdq_run_options_init(sdq_run_options* opt) {
  if (!opt) return;
  opt->seed = 0;
  opt->has_seed = 0;
  opt->threads = 1;
  opt->tol_scale = 1.0;
  opt->out_dir = nullptr;
}

sdq_status sdq_scenario_load(const char* path, sdq_scenario** out) {
  if (!path) return bad_argument("path");
  if (!out) return bad_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto* s = new sdq_scenario{sdq::load_config(path)};
    *out = s;
    return SDQ_OK;
  });
}

sdq_status sdq_scenario_parse(const char* text, const char* source, sdq_scenario** out) {
  if (!text) return bad_argument("text");
  if (!out) return bad_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto* s = new sdq_scenario{sdq::parse_config(text, source ? source : "<config>")};
    *out = s;
    return SDQ_OK;
  });
}

void sdq_scenario_free(sdq_scenario* s) { delete s; }

const char* sdq_scenario_name(const sdq_scenario* s) { return s ? s->cfg.name.c_str() : ""; }

sdq_status sdq_scenario_serialize(const sdq_scenario* s, char** out) {
  if (!s) return bad_argument("scenario");
  if (!out) return bad_argument("out");
  *out = nullptr;
  return guarded([&] {
    std::string t = sdq::serialize_config(s->cfg);
    char* buf = new char[t.size() + 1];
    std::memcpy(buf, t.c_str(), t.size() + 1);
    *out = buf;
    return SDQ_OK;
  });
}

void sdq_string_free(char* s) { delete[] s; }

size_t sdq_suite_count(void) { return sdq::suite_names().size(); }

const char* sdq_suite_name(size_t i) {
  const auto& n = sdq::suite_names();
  return i < n.size() ? n[i].c_str() : nullptr;
}

sdq_status sdq_run_suite(const sdq_scenario* s, const char* suite, const sdq_run_options* opt, sdq_report** out) {
  if (!s) return bad_argument("scenario");
  if (!suite) return bad_argument("suite");
  if (!out) return bad_argument("out");
  *out = nullptr;
  return guarded([&] {
    sdq::RunOptions ro;
    if (opt) {
      ro.seed = opt->seed;
      ro.seed_set = opt->has_seed != 0;
      ro.threads = opt->threads;
      ro.tol_scale = opt->tol_scale;
      if (opt->out_dir) ro.out_dir = opt->out_dir;
    }
    auto* r = new sdq_report{sdq::run_suite(s->cfg, suite, ro), {}};
    r->text = r->rep.text();
    *out = r;
    return r->rep.passed() ? SDQ_OK : SDQ_FAILED;
  });
}

const char* sdq_report_text(const sdq_report* r) { return r ? r->text.c_str() : ""; }

int sdq_report_passed(const sdq_report* r) { return r && r->rep.passed() ? 1 : 0; }

size_t sdq_report_count(const sdq_report* r) { return r ? r->rep.outcomes.size() : 0; }

sdq_status sdq_report_outcome(const sdq_report* r, size_t i, const char** suite, int* passed, int* skipped,
                              const char** detail) {
  if (!r) return bad_argument("report");
  if (i >= r->rep.outcomes.size()) {
    g_last_error = "outcome index out of range";
    return SDQ_ERR_DOMAIN;
  }
  const auto& o = r->rep.outcomes[i];
  if (suite) *suite = o.suite.c_str();
  if (passed) *passed = o.passed ? 1 : 0;
  if (skipped) *skipped = o.skipped ? 1 : 0;
  if (detail) *detail = o.detail.c_str();
  return SDQ_OK;
}

void sdq_report_free(sdq_report* r) { delete r; }

sdq_status sdq_kernel_norm(const double* kernel, const double* weights, int n, uint64_t seed, double* out) {
  if (!kernel) return bad_argument("kernel");
  if (!weights) return bad_argument("weights");
  if (!out) return bad_argument("out");
  if (n < 1) {
    g_last_error = "kernel size must be positive";
    return SDQ_ERR_DOMAIN;
  }
  return guarded([&] {
    Eigen::MatrixXcd K(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) K(i, j) = sdq::cplx(kernel[2 * (i * n + j)], kernel[2 * (i * n + j) + 1]);
    sdq::Vec w(weights, weights + n);
    sdq::NormOptions no;
    no.seed = seed;
    auto e = sdq::make_kernel_element(sdq::ModelKind::finite_pair, sdq::BandedKernel::from_dense(K, w));
    *out = sdq::reduced_norm(e, no).value;
    return SDQ_OK;
  });
}

}  // extern "C"
