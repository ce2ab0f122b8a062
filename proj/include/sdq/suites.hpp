// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdq/config.hpp"
#include "sdq/harness.hpp"

namespace sdq {

struct RunOptions {
  std::uint64_t seed = 0;
  bool seed_set = false;  // otherwise the config seed is used
  int threads = 1;
  double tol_scale = 1.0;  // multiplies absolute tolerances, not ratio thresholds
  std::string out_dir;     // empty: no files written
};

struct SuiteOutcome {
  std::string suite;
  bool passed = false;
  bool skipped = false;
  std::string detail;
  std::string line() const;  // "PASS suite [scenario] detail"
};

struct SuiteReport {
  std::string scenario;
  std::vector<SuiteOutcome> outcomes;
  bool passed() const;
  std::string text() const;  // one line per suite
};

const std::vector<std::string>& suite_names();  // without "all"
bool is_suite_name(const std::string& s);

// Runs one suite, or every suite for "all".  Numerical failures are reported, not thrown;
// configuration problems throw Error(ErrorCode::config).
SuiteReport run_suite(const ScenarioConfig& cfg, const std::string& suite, const RunOptions& opt);

double tolerance(const ScenarioConfig& cfg, const RunOptions& opt, const std::string& key);

std::string sweep_csv(const SweepResult& r);
std::string sweep_json(const SweepResult& r, const std::vector<std::pair<std::string, bool>>& flags);

}  // namespace sdq
