// SPDX-License-Identifier: Apache-2.0
// sdq-lab: scenario-driven batch front end over the sdq C API.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdq/sdq.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

std::string suite_list() {
  std::string s;
  for (size_t i = 0; i < sdq_suite_count(); ++i) s += std::string(sdq_suite_name(i)) + ", ";
  return s + "all";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run quantization suites on a scenario file"};
  std::string config, out_dir, suite;
  long long seed = 0;
  int threads = 1;
  double tol_scale = 1.0;
  bool print_config = false;
  app.add_option("--config", config, "scenario file")->required();
  app.add_option("--out", out_dir, "directory for CSV/JSON/binary artifacts");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed, overrides the scenario seed");
  app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--tol-scale", tol_scale, "multiplier for absolute tolerances")->check(CLI::PositiveNumber);
  app.add_flag("--print-config", print_config, "print the normalized scenario and exit");
  app.add_option("suite", suite, "one of: " + suite_list());
  app.footer("Exit status: 0 all suites pass, 1 a numerical criterion failed, 2 configuration error.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  sdq_scenario* sc = nullptr;
  sdq_status st = sdq_scenario_load(config.c_str(), &sc);
  if (st != SDQ_OK) {
    std::fprintf(stderr, "sdq-lab: %s\n", sdq_last_error());
    return st == SDQ_ERR_CONFIG || st == SDQ_ERR_IO ? kExitConfig : kExitFail;
  }

  if (print_config) {
    char* text = nullptr;
    st = sdq_scenario_serialize(sc, &text);
    if (st == SDQ_OK) std::fputs(text, stdout);
    sdq_string_free(text);
    sdq_scenario_free(sc);
    return st == SDQ_OK ? kExitPass : kExitFail;
  }
  if (suite.empty()) {
    std::fprintf(stderr, "sdq-lab: missing suite (%s)\n", suite_list().c_str());
    sdq_scenario_free(sc);
    return kExitConfig;
  }

  sdq_run_options opt;
  sdq_run_options_init(&opt);
  opt.seed = static_cast<uint64_t>(seed);
  opt.has_seed = seed_opt->count() > 0;
  opt.threads = threads;
  opt.tol_scale = tol_scale;
  opt.out_dir = out_dir.empty() ? nullptr : out_dir.c_str();

  sdq_report* rep = nullptr;
  st = sdq_run_suite(sc, suite.c_str(), &opt, &rep);
  int code = kExitPass;
  if (rep) {
    std::fputs(sdq_report_text(rep), stdout);
    std::fflush(stdout);
    for (size_t i = 0; i < sdq_report_count(rep); ++i) {
      const char* name = nullptr;
      int passed = 1;
      sdq_report_outcome(rep, i, &name, &passed, nullptr, nullptr);
      if (!passed) std::fprintf(stderr, "sdq-lab: criterion failed: %s\n", name);
    }
    if (!sdq_report_passed(rep)) code = kExitFail;
    sdq_report_free(rep);
  } else {
    std::fprintf(stderr, "sdq-lab: %s\n", sdq_last_error());
    code = st == SDQ_ERR_CONFIG ? kExitConfig : kExitFail;
  }
  sdq_scenario_free(sc);
  return code;
}
