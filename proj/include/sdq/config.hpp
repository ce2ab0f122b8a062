// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sdq/observables.hpp"
#include "sdq/quantize.hpp"

namespace sdq {

// Flat `key = value` scenario file; lists are comma separated, `#` starts a comment.
struct ScenarioConfig {
  std::string name;

  // model.*
  std::string model_kind = "grid-pair";  // finite-pair | grid-pair | exp-nilpotent-group | transformation
  int units = 16;
  Vec unit_weights;
  Vec base_box{-8.0, 8.0};
  std::string group = "heisenberg";  // heisenberg | abelian
  int dim = 3;
  double lambda_min = 1.0;
  double theta_extent = 8.0;
  std::string action = "rotation";
  Vec radii{0.5, 0.8, 1.2};
  Vec bloch_phases{0.0, 0.5};

  // algebroid.*
  std::string algebroid = "auto";  // auto | abelian | tangent | heisenberg | action-rotation | constant
  int base_dim = 1;
  int fiber_dim = 1;
  Vec a;          // constant anchor, p x n row-major
  Vec c;          // constant bracket, groups of (i, j, k, value)
  std::string derivatives = "analytic";  // analytic | finite-difference
  double h_fd = 1e-5;
  Vec box_lo, box_hi;
  int samples = 3;

  // grid.*, kappa.*, chi.*
  double half_width = 12.0;
  int points = 128;
  double band_limit = 2.0;
  double kappa_inner = 0, kappa_outer = 0;  // 0: defaults from the grid
  double chi_plateau = 0, chi_max = 0;      // 0: defaults from hbar_list

  std::string sign_convention = "standard";  // standard | weyl
  Vec hbar_list{0.4, 0.2, 0.1, 0.05};
  Vec continuity_hbar_list;
  Vec derivative_hbar_list;

  std::map<std::string, ObservableSpec> observables;  // f, g, h, b1, b2
  std::map<std::string, double> tol;                  // filled with defaults by the parser

  std::string output_csv = "sweep.csv";
  std::string output_json = "summary.json";
  std::uint64_t seed = 20240917ULL;

  bool operator==(const ScenarioConfig&) const = default;
};

// Tolerance keys with their defaults (absolute ones scale with --tol-scale; ratios do not).
const std::map<std::string, double>& default_tolerances();
bool tolerance_is_ratio(const std::string& key);

ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);
// Semantic checks beyond syntax; errors name the offending field.
void validate_config(const ScenarioConfig& cfg);

GroupoidModel build_model(const ScenarioConfig& cfg);
StructureFunctions build_structure(const ScenarioConfig& cfg);
QuantizationScenario build_scenario(const ScenarioConfig& cfg);
bool has_observable(const ScenarioConfig& cfg, const std::string& key);
PhaseFunction build_observable(const ScenarioConfig& cfg, const std::string& key, const QuantizationScenario& sc);

}  // namespace sdq
