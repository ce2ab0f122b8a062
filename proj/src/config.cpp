// SPDX-License-Identifier: Apache-2.0
#include "sdq/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace sdq {

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"axioms_analytic", 1e-9}, {"axioms_fd", 1e-5},     {"fourier", 1e-8},      {"transform_rules", 1e-6},
      {"convolution", 1e-14},    {"cstar", 1e-8},         {"svd", 1e-8},          {"bch", 1e-4},
      {"bch_pair", 1e-6},        {"moyal", 1e-6},         {"dirac_ratio", 0.7},   {"dirac_final", 0.15},
      {"noise_factor", 10.0},    {"mult_final", 0.25},    {"continuity", 0.05},   {"derivative", 1e-3},
      {"self_adjoint", 1e-10},   {"norm", 1e-9},
  };
  return t;
}

bool tolerance_is_ratio(const std::string& key) {
  static const std::set<std::string> r = {"dirac_ratio", "dirac_final", "noise_factor", "mult_final", "continuity"};
  return r.count(key) > 0;
}

namespace {

const std::set<std::string> kObsParams = {"amp", "q0", "sq", "e0", "se", "var", "coeffs", "radius"};
const std::set<std::string> kFamilies = {"gaussian-envelope", "polynomial-times-gaussian", "band-limited-bump",
                                         "base-gaussian"};

struct FieldError {
  std::string field, msg;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::string t = trim(v);
  if (t.empty()) throw FieldError{key, "expected a number"};
  char* end = nullptr;
  errno = 0;
  double d = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(d))
    throw FieldError{key, "'" + t + "' is not a finite number"};
  return d;
}

long to_int(const std::string& key, const std::string& v) {
  std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  long d = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) throw FieldError{key, "'" + t + "' is not an integer"};
  return d;
}

Vec to_list(const std::string& key, const std::string& v) {
  Vec out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string fmt(double d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string fmt_list(const Vec& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

bool is_pow2(long n) { return n > 0 && (n & (n - 1)) == 0; }

void check_hbar_list(const std::string& key, const Vec& h, bool required) {
  if (h.empty()) {
    if (required) throw FieldError{key, "must list at least one value"};
    return;
  }
  for (size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0)) throw FieldError{key, "entries must be positive (got " + fmt(h[i]) + ")"};
    if (i > 0 && !(h[i] < h[i - 1])) throw FieldError{key, "entries must be strictly decreasing"};
  }
}

void validate_fields(const ScenarioConfig& c) {
  if (c.name.empty()) throw FieldError{"name", "must not be empty"};
  static const std::set<std::string> kinds = {"finite-pair", "grid-pair", "exp-nilpotent-group", "transformation"};
  if (!kinds.count(c.model_kind)) throw FieldError{"model.kind", "unknown model kind '" + c.model_kind + "'"};
  if (c.units < 1) throw FieldError{"model.units", "must be at least 1"};
  if (!c.unit_weights.empty()) {
    if (static_cast<int>(c.unit_weights.size()) != c.units) throw FieldError{"model.weights", "needs one weight per unit"};
    for (double w : c.unit_weights)
      if (!(w > 0)) throw FieldError{"model.weights", "weights must be positive"};
  }
  if (c.base_box.size() != 2 || !(c.base_box[0] < c.base_box[1]))
    throw FieldError{"model.base_box", "expects 'lo, hi' with lo < hi"};
  if (c.group != "heisenberg" && c.group != "abelian") throw FieldError{"model.group", "expects heisenberg or abelian"};
  if (c.dim < 1 || c.dim > 3) throw FieldError{"model.dim", "must lie in 1..3"};
  if (!(c.lambda_min > 0)) throw FieldError{"model.lambda_min", "must be positive"};
  if (!(c.theta_extent > 0)) throw FieldError{"model.theta_extent", "must be positive"};
  if (c.action != "rotation") throw FieldError{"model.action", "only 'rotation' is available"};
  if (c.model_kind == "transformation" && c.radii.empty()) throw FieldError{"model.radii", "needs at least one radius"};
  for (double r : c.radii)
    if (!(r > 0)) throw FieldError{"model.radii", "radii must be positive"};
  for (double k : c.bloch_phases)
    if (!(k >= 0 && k < 1)) throw FieldError{"model.bloch_phases", "phases must lie in [0, 1)"};
  if (c.model_kind == "transformation" && c.bloch_phases.empty())
    throw FieldError{"model.bloch_phases", "needs at least one phase"};

  static const std::set<std::string> builtins = {"auto", "abelian", "tangent", "heisenberg", "action-rotation",
                                                 "constant"};
  if (!builtins.count(c.algebroid)) throw FieldError{"algebroid.builtin", "unknown builtin '" + c.algebroid + "'"};
  if (c.base_dim < 0 || c.base_dim > 3) throw FieldError{"algebroid.base_dim", "must lie in 0..3"};
  if (c.fiber_dim < 1 || c.fiber_dim > 4) throw FieldError{"algebroid.fiber_dim", "must lie in 1..4"};
  if (c.algebroid == "constant") {
    if (c.a.size() != static_cast<size_t>(c.base_dim) * c.fiber_dim)
      throw FieldError{"algebroid.a", "needs fiber_dim x base_dim entries"};
    if (c.c.size() % 4) throw FieldError{"algebroid.c", "expects groups of four numbers (i, j, k, value)"};
    for (size_t i = 0; i < c.c.size(); i += 4)
      for (int t = 0; t < 3; ++t) {
        double v = c.c[i + t];
        if (v != std::floor(v) || v < 0 || v >= c.fiber_dim) throw FieldError{"algebroid.c", "index out of range"};
      }
  }
  if (c.derivatives != "analytic" && c.derivatives != "finite-difference")
    throw FieldError{"algebroid.derivatives", "expects analytic or finite-difference"};
  if (!(c.h_fd > 0 && c.h_fd < 0.1)) throw FieldError{"algebroid.h_fd", "must lie in (0, 0.1)"};
  if (c.box_lo.size() != c.box_hi.size()) throw FieldError{"algebroid.box_hi", "must match algebroid.box_lo"};
  for (size_t i = 0; i < c.box_lo.size(); ++i)
    if (!(c.box_lo[i] < c.box_hi[i])) throw FieldError{"algebroid.box_hi", "needs box_lo < box_hi"};
  if (c.samples < 1 || c.samples > 64) throw FieldError{"algebroid.samples", "must lie in 1..64"};

  if (!(c.half_width > 0)) throw FieldError{"grid.half_width", "must be positive"};
  if (!is_pow2(c.points) || c.points < 4 || c.points > 4096)
    throw FieldError{"grid.points", "must be a power of two in 4..4096"};
  if (!(c.band_limit > 0 && c.band_limit < c.half_width / 2))
    throw FieldError{"grid.band_limit", "must lie in (0, half_width / 2)"};
  if (c.kappa_inner != 0 || c.kappa_outer != 0)
    if (!(c.kappa_inner > 0 && c.kappa_outer > c.kappa_inner))
      throw FieldError{"kappa.r_outer", "needs 0 < r_inner < r_outer"};
  if (c.chi_plateau != 0 || c.chi_max != 0)
    if (!(c.chi_plateau > 0 && c.chi_max > c.chi_plateau)) throw FieldError{"chi.max", "needs 0 < plateau < max"};
  if (c.sign_convention != "standard" && c.sign_convention != "weyl")
    throw FieldError{"sign_convention", "expects standard or weyl"};
  check_hbar_list("hbar_list", c.hbar_list, true);
  check_hbar_list("continuity.hbar_list", c.continuity_hbar_list, false);
  check_hbar_list("derivative.hbar_list", c.derivative_hbar_list, false);

  for (const auto& [k, spec] : c.observables) {
    if (!kFamilies.count(spec.family))
      throw FieldError{"observable." + k + ".family", "unknown family '" + spec.family + "'"};
    for (const auto& [p, v] : spec.params)
      if (!kObsParams.count(p)) throw FieldError{"observable." + k + "." + p, "unknown parameter"};
  }
  for (const auto& [k, v] : c.tol)
    if (!(v > 0)) throw FieldError{"tol." + k, "must be positive"};
  if (c.output_csv.empty()) throw FieldError{"output.csv", "must not be empty"};
  if (c.output_json.empty()) throw FieldError{"output.json", "must not be empty"};
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s = {
      {"name", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.name = trim(v); }},
      {"model.kind", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.model_kind = trim(v); }},
      {"model.units", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.units = static_cast<int>(to_int(k, v)); }},
      {"model.weights", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.unit_weights = to_list(k, v); }},
      {"model.base_box", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.base_box = to_list(k, v); }},
      {"model.group", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.group = trim(v); }},
      {"model.dim", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.dim = static_cast<int>(to_int(k, v)); }},
      {"model.lambda_min", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.lambda_min = to_double(k, v); }},
      {"model.theta_extent", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.theta_extent = to_double(k, v); }},
      {"model.action", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.action = trim(v); }},
      {"model.radii", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.radii = to_list(k, v); }},
      {"model.bloch_phases", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.bloch_phases = to_list(k, v); }},
      {"algebroid.builtin", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.algebroid = trim(v); }},
      {"algebroid.base_dim", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.base_dim = static_cast<int>(to_int(k, v)); }},
      {"algebroid.fiber_dim", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.fiber_dim = static_cast<int>(to_int(k, v)); }},
      {"algebroid.a", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.a = to_list(k, v); }},
      {"algebroid.c", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.c = to_list(k, v); }},
      {"algebroid.derivatives", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.derivatives = trim(v); }},
      {"algebroid.h_fd", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.h_fd = to_double(k, v); }},
      {"algebroid.box_lo", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.box_lo = to_list(k, v); }},
      {"algebroid.box_hi", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.box_hi = to_list(k, v); }},
      {"algebroid.samples", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.samples = static_cast<int>(to_int(k, v)); }},
      {"grid.half_width", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.half_width = to_double(k, v); }},
      {"grid.points", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.points = static_cast<int>(to_int(k, v)); }},
      {"grid.band_limit", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.band_limit = to_double(k, v); }},
      {"kappa.r_inner", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.kappa_inner = to_double(k, v); }},
      {"kappa.r_outer", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.kappa_outer = to_double(k, v); }},
      {"chi.plateau", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.chi_plateau = to_double(k, v); }},
      {"chi.max", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.chi_max = to_double(k, v); }},
      {"sign_convention", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.sign_convention = trim(v); }},
      {"hbar_list", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.hbar_list = to_list(k, v); }},
      {"continuity.hbar_list", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.continuity_hbar_list = to_list(k, v); }},
      {"derivative.hbar_list", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.derivative_hbar_list = to_list(k, v); }},
      {"output.csv", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.output_csv = trim(v); }},
      {"output.json", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.output_json = trim(v); }},
      {"seed", [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         long s = to_int(k, v);
         if (s < 0) throw FieldError{k, "must be non-negative"};
         c.seed = static_cast<std::uint64_t>(s);
       }},
  };
  return s;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  ScenarioConfig c;
  c.tol = default_tolerances();
  c.hbar_list.clear();
  std::map<std::string, int> line_of;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](int line, const std::string& field, const std::string& msg) {
    std::ostringstream os;
    os << source << ":" << line << ": field '" << field << "': " << msg;
    throw Error(ErrorCode::config, os.str());
  };
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, line, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, "", "missing key");
    if (line_of.count(key)) fail(lineno, key, "duplicate key (first set on line " + std::to_string(line_of[key]) + ")");
    line_of[key] = lineno;
    try {
      auto it = setters().find(key);
      if (it != setters().end()) {
        it->second(c, key, value);
      } else if (key.rfind("tol.", 0) == 0) {
        std::string t = key.substr(4);
        if (!default_tolerances().count(t)) throw FieldError{key, "unknown tolerance"};
        c.tol[t] = to_double(key, value);
      } else if (key.rfind("observable.", 0) == 0) {
        std::string rest = key.substr(11);
        size_t dot = rest.find('.');
        if (dot == std::string::npos || dot == 0) throw FieldError{key, "expected observable.<name>.<field>"};
        std::string obs = rest.substr(0, dot), field = rest.substr(dot + 1);
        if (field == "family") {
          c.observables[obs].family = value;
        } else {
          if (!kObsParams.count(field)) throw FieldError{key, "unknown observable parameter"};
          c.observables[obs].params[field] = to_list(key, value);
        }
      } else {
        throw FieldError{key, "unknown key"};
      }
    } catch (const FieldError& e) {
      fail(lineno, e.field, e.msg);
    }
  }
  if (!line_of.count("hbar_list")) fail(lineno, "hbar_list", "missing required key");
  if (!line_of.count("name")) fail(lineno, "name", "missing required key");
  try {
    validate_fields(c);
  } catch (const FieldError& e) {
    int l = line_of.count(e.field) ? line_of[e.field] : lineno;
    fail(l, e.field, e.msg);
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void validate_config(const ScenarioConfig& cfg) {
  try {
    validate_fields(cfg);
  } catch (const FieldError& e) {
    throw Error(ErrorCode::config, "field '" + e.field + "': " + e.msg);
  }
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "name = " << c.name << "\n";
  os << "model.kind = " << c.model_kind << "\n";
  os << "model.units = " << c.units << "\n";
  os << "model.weights = " << fmt_list(c.unit_weights) << "\n";
  os << "model.base_box = " << fmt_list(c.base_box) << "\n";
  os << "model.group = " << c.group << "\n";
  os << "model.dim = " << c.dim << "\n";
  os << "model.lambda_min = " << fmt(c.lambda_min) << "\n";
  os << "model.theta_extent = " << fmt(c.theta_extent) << "\n";
  os << "model.action = " << c.action << "\n";
  os << "model.radii = " << fmt_list(c.radii) << "\n";
  os << "model.bloch_phases = " << fmt_list(c.bloch_phases) << "\n";
  os << "algebroid.builtin = " << c.algebroid << "\n";
  os << "algebroid.base_dim = " << c.base_dim << "\n";
  os << "algebroid.fiber_dim = " << c.fiber_dim << "\n";
  os << "algebroid.a = " << fmt_list(c.a) << "\n";
  os << "algebroid.c = " << fmt_list(c.c) << "\n";
  os << "algebroid.derivatives = " << c.derivatives << "\n";
  os << "algebroid.h_fd = " << fmt(c.h_fd) << "\n";
  os << "algebroid.box_lo = " << fmt_list(c.box_lo) << "\n";
  os << "algebroid.box_hi = " << fmt_list(c.box_hi) << "\n";
  os << "algebroid.samples = " << c.samples << "\n";
  os << "grid.half_width = " << fmt(c.half_width) << "\n";
  os << "grid.points = " << c.points << "\n";
  os << "grid.band_limit = " << fmt(c.band_limit) << "\n";
  os << "kappa.r_inner = " << fmt(c.kappa_inner) << "\n";
  os << "kappa.r_outer = " << fmt(c.kappa_outer) << "\n";
  os << "chi.plateau = " << fmt(c.chi_plateau) << "\n";
  os << "chi.max = " << fmt(c.chi_max) << "\n";
  os << "sign_convention = " << c.sign_convention << "\n";
  os << "hbar_list = " << fmt_list(c.hbar_list) << "\n";
  os << "continuity.hbar_list = " << fmt_list(c.continuity_hbar_list) << "\n";
  os << "derivative.hbar_list = " << fmt_list(c.derivative_hbar_list) << "\n";
  for (const auto& [k, spec] : c.observables) {
    os << "observable." << k << ".family = " << spec.family << "\n";
    for (const auto& [p, v] : spec.params) os << "observable." << k << "." << p << " = " << fmt_list(v) << "\n";
  }
  for (const auto& [k, v] : c.tol) os << "tol." << k << " = " << fmt(v) << "\n";
  os << "output.csv = " << c.output_csv << "\n";
  os << "output.json = " << c.output_json << "\n";
  os << "seed = " << c.seed << "\n";
  return os.str();
}

GroupoidModel build_model(const ScenarioConfig& c) {
  if (c.model_kind == "finite-pair") return GroupoidModel::finite_pair(c.units, c.unit_weights);
  if (c.model_kind == "grid-pair") return GroupoidModel::grid_pair(c.base_box[0], c.base_box[1]);
  if (c.model_kind == "exp-nilpotent-group") {
    GroupoidModel m = c.group == "heisenberg" ? GroupoidModel::heisenberg_group() : GroupoidModel::abelian_group(c.dim);
    m.lambda_min = c.lambda_min;
    m.theta2_extent = c.theta_extent;
    return m;
  }
  GroupoidModel m = GroupoidModel::rotation_action(c.radii, c.bloch_phases);
  m.base_lo = c.base_box[0];
  m.base_hi = c.base_box[1];
  m.validate();
  return m;
}

StructureFunctions build_structure(const ScenarioConfig& c) {
  StructureFunctions sf;
  if (c.algebroid == "auto") {
    FiberGrid g;
    g.L = c.half_width;
    g.N = c.points;
    sf = QuantizationScenario::make(c.name, build_model(c), SignConvention::standard, g, c.hbar_list).sf;
  } else {
    const int n = c.algebroid == "heisenberg" ? 0 : c.algebroid == "action-rotation" ? 2 : c.base_dim;
    Box box;
    if (!c.box_lo.empty()) {
      if (static_cast<int>(c.box_lo.size()) != n)
        throw Error(ErrorCode::config, "field 'algebroid.box_lo': needs one entry per base dimension");
      box = Box{c.box_lo, c.box_hi};
    } else {
      box = Box{Vec(n, c.base_box[0]), Vec(n, c.base_box[1])};
    }
    if (c.algebroid == "abelian") sf = sf_abelian(n, c.fiber_dim, box);
    else if (c.algebroid == "tangent") sf = sf_tangent(n, box);
    else if (c.algebroid == "heisenberg") sf = sf_heisenberg();
    else if (c.algebroid == "action-rotation") sf = sf_action_rotation(box);
    else {
      std::vector<CEntry> ce;
      for (size_t i = 0; i + 3 < c.c.size(); i += 4)
        ce.push_back(CEntry{static_cast<int>(c.c[i]), static_cast<int>(c.c[i + 1]), static_cast<int>(c.c[i + 2]), c.c[i + 3]});
      sf = sf_constant(n, c.fiber_dim, box, c.a, ce);
    }
    if (n > 0 && c.algebroid != "action-rotation") sf.chart = ChartDomain::uniform(n, sf.p(), box.lo, box.hi, c.samples);
  }
  if (c.derivatives == "finite-difference") {
    sf.mode = DerivativeMode::finite_difference;
    sf.h_fd = c.h_fd;
  }
  return sf;
}

QuantizationScenario build_scenario(const ScenarioConfig& c) {
  FiberGrid g;
  g.L = c.half_width;
  g.N = c.points;
  SignConvention sign = c.sign_convention == "weyl" ? SignConvention::weyl : SignConvention::standard;
  QuantizationScenario sc = QuantizationScenario::make(c.name, build_model(c), sign, g, c.hbar_list);
  if (c.algebroid != "auto") sc.sf = build_structure(c);
  else if (c.derivatives == "finite-difference") {
    sc.sf.mode = DerivativeMode::finite_difference;
    sc.sf.h_fd = c.h_fd;
  }
  if (c.kappa_inner > 0) sc.kappa = CutoffKappa{c.kappa_inner, c.kappa_outer};
  if (c.chi_plateau > 0) sc.chi = HbarCutoffChi{c.chi_plateau, c.chi_max};
  sc.validate();
  return sc;
}

bool has_observable(const ScenarioConfig& cfg, const std::string& key) { return cfg.observables.count(key) > 0; }

PhaseFunction build_observable(const ScenarioConfig& cfg, const std::string& key, const QuantizationScenario& sc) {
  auto it = cfg.observables.find(key);
  if (it == cfg.observables.end()) throw Error(ErrorCode::config, "observable '" + key + "' is not defined");
  try {
    return make_observable(it->second, sc.model.base_dim(), sc.model.fiber_dim(), sc.grid);
  } catch (const Error& e) {
    throw Error(ErrorCode::config, "observable '" + key + "': " + e.what());
  }
}

}  // namespace sdq
