// SPDX-License-Identifier: Apache-2.0
#include "sdq/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace sdq {

namespace {

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", v);
  return b;
}

std::string g17(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

struct Ctx {
  const ScenarioConfig& cfg;
  const RunOptions& opt;
  std::uint64_t seed;
  double tol(const std::string& k) const { return tolerance(cfg, opt, k); }
  NormOptions norm() const {
    NormOptions n;
    n.tol = tol("norm");
    n.seed = seed;
    return n;
  }
  bool finite() const { return cfg.model_kind == "finite-pair"; }
  bool writes() const { return !opt.out_dir.empty(); }
  std::string path(const std::string& file) const { return (std::filesystem::path(opt.out_dir) / file).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  os << content;
}

SuiteOutcome skipped(const std::string& suite, const std::string& why) {
  SuiteOutcome o;
  o.suite = suite;
  o.passed = true;
  o.skipped = true;
  o.detail = why;
  return o;
}

// ---- check-axioms ----
SuiteOutcome suite_axioms(const Ctx& c) {
  SuiteOutcome o{"check-axioms", false, false, {}};
  std::ostringstream d;
  GroupoidModel m = build_model(c.cfg);
  GroupoidAxiomReport gr = check_groupoid_axioms(m, c.seed, 200, 1e-12 * c.opt.tol_scale);
  d << "groupoid assoc " << sci(gr.associativity) << " inv " << sci(gr.inverse);
  bool ok = gr.pass;
  if (!c.finite()) {
    StructureFunctions sf = build_structure(c.cfg);
    double t = sf.mode == DerivativeMode::analytic ? c.tol("axioms_analytic") : c.tol("axioms_fd");
    AxiomReport ar = check_axioms(sf, t);
    d << "; " << sf.name << " jacobi " << sci(ar.jacobi_residual) << " anchor " << sci(ar.anchor_residual) << " (tol "
      << sci(t) << ")";
    ok = ok && ar.pass;
  }
  o.passed = ok;
  o.detail = d.str();
  return o;
}

// ---- fourier-selftest ----
SuiteOutcome suite_fourier(const Ctx& c) {
  SuiteOutcome o{"fourier-selftest", false, false, {}};
  FiberGrid g;
  g.L = c.cfg.half_width;
  g.N = c.cfg.points;
  g.p = c.finite() ? 1 : build_model(c.cfg).fiber_dim();
  if (g.p > 2) g.N = std::min(g.N, 64);
  g.validate();
  std::vector<Vec> base{Vec(c.finite() ? 0 : build_model(c.cfg).base_dim(), 0.0)};
  PrimalFunction gauss = [p = g.p](const double*, const double* xi) {
    double r2 = 0;
    for (int d = 0; d < p; ++d) r2 += xi[d] * xi[d];
    return cplx(std::exp(-0.5 * r2), 0.0);
  };
  SampledFiberFunction s = sample_primal(gauss, g, base);
  DensityWeight mu = DensityWeight::lebesgue();
  SampledFiberFunction F = fourier_forward(s, mu);
  SampledFiberFunction back = fourier_inverse(F, mu);
  double rt = 0, pair = 0;
  std::vector<double> th(g.p);
  const double norm = std::pow(2 * kPi, 0.5 * g.p);
  for (size_t i = 0; i < g.total(); ++i) {
    rt = std::max(rt, std::abs(back.values[0][i] - s.values[0][i]));
    g.dual_point(i, th.data());
    double r2 = 0;
    for (double t : th) r2 += t * t;
    pair = std::max(pair, std::abs(F.values[0][i] - norm * std::exp(-0.5 * r2)));
  }
  TransformRulesReport rr = check_transform_rules(gauss, g, base, mu, c.tol("transform_rules"));
  const double tf = c.tol("fourier");
  o.passed = rt <= tf && pair <= tf && rr.pass;
  std::ostringstream d;
  d << "N=" << g.N << " L=" << g.L << " p=" << g.p << " roundtrip " << sci(rt) << " gaussian-pair " << sci(pair)
    << " dual-derivative " << sci(rr.dual_derivative_residual) << " primal-derivative " << sci(rr.primal_derivative_residual);
  o.detail = d.str();
  return o;
}

// ---- norms ----
SuiteOutcome norms_finite(const Ctx& c) {
  SuiteOutcome o{"norms", false, false, {}};
  GroupoidModel m = build_model(c.cfg);
  const int n = m.units;
  Vec w = m.unit_weights.empty() ? Vec(n, 1.0) : m.unit_weights;
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> nd;
  auto rnd = [&] {
    Eigen::MatrixXcd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = cplx(nd(rng), nd(rng));
    return M;
  };
  Eigen::MatrixXcd A = rnd(), B = rnd();
  AlgebraElement a = make_kernel_element(ModelKind::finite_pair, BandedKernel::from_dense(A, w));
  AlgebraElement b = make_kernel_element(ModelKind::finite_pair, BandedKernel::from_dense(B, w));
  Eigen::MatrixXcd W = Eigen::VectorXd::Map(w.data(), n).cast<cplx>().asDiagonal();
  double conv = (convolve(a, b).kernel.to_dense() - A * W * B).cwiseAbs().maxCoeff();
  NormOptions no = c.norm();
  double na = reduced_norm(a, no).value;
  double nsa = reduced_norm(convolve(involute(a), a), no).value;
  double cstar = std::fabs(nsa - na * na) / (na * na);
  Eigen::MatrixXcd S = W.cwiseSqrt() * A * W.cwiseSqrt();
  double svd = Eigen::JacobiSVD<Eigen::MatrixXcd>(S).singularValues()(0);
  double dn = std::fabs(na - svd) / svd;
  o.passed = conv <= c.tol("convolution") && cstar <= c.tol("cstar") && dn <= c.tol("svd");
  o.detail = "convolution " + sci(conv) + " C*-identity " + sci(cstar) + " norm-vs-svd " + sci(dn);
  return o;
}

std::vector<std::string> real_observables(const ScenarioConfig& cfg, const QuantizationScenario& sc) {
  std::vector<std::string> out;
  for (const auto& [k, spec] : cfg.observables)
    if (build_observable(cfg, k, sc).real_valued) out.push_back(k);
  return out;
}

SuiteOutcome suite_norms(const Ctx& c) {
  if (c.finite()) return norms_finite(c);
  SuiteOutcome o{"norms", false, false, {}};
  QuantizationScenario sc = build_scenario(c.cfg);
  double worst = 0, zero_dev = 0;
  int count = 0;
  for (const auto& k : real_observables(c.cfg, sc)) {
    PhaseFunction f = build_observable(c.cfg, k, sc);
    for (double h : sc.hbar_list) {
      worst = std::max(worst, self_adjointness_defect(weyl_quantize(sc, f, h)));
      ++count;
    }
    double s0 = seminorm(sc, f, 0.0), sup = sup_norm(sc, f);
    zero_dev = std::max(zero_dev, std::fabs(s0 - sup));
  }
  o.passed = worst <= c.tol("self_adjoint") && zero_dev == 0.0;
  o.detail = "self-adjointness defect " + sci(worst) + " over " + std::to_string(count) +
             " (observable, hbar) pairs; hbar=0 seminorm vs sup " + sci(zero_dev);
  return o;
}

// ---- quantize ----
SuiteOutcome suite_quantize(const Ctx& c) {
  if (c.finite()) return skipped("quantize", "finite pair groupoid has no quantization map");
  SuiteOutcome o{"quantize", false, false, {}};
  QuantizationScenario sc = build_scenario(c.cfg);
  if (!has_observable(c.cfg, "f")) throw Error(ErrorCode::config, "quantize needs observable f");
  PhaseFunction f = build_observable(c.cfg, "f", sc);
  std::ostringstream d;
  bool ok = true;
  Warnings warn;
  double sa = 0;
  for (double h : sc.hbar_list) {
    AlgebraElement Q = weyl_quantize(sc, f, h, &warn);
    if (f.real_valued) sa = std::max(sa, self_adjointness_defect(Q));
    if (h == sc.hbar_list.front() && c.writes()) {
      Eigen::MatrixXcd M;
      if (Q.rep == RepKind::kernel) M = Q.kernel.to_dense();
      else if (Q.rep == RepKind::slices) {
        for (const auto& s : Q.slices)
          if (s.K.width() > 0 && s.K.n < 4096) {
            M = s.K.to_dense();
            break;
          }
      }
      if (M.size() > 0) write_kernel_binary(c.path("kernel_f.bin"), M);
    }
  }
  d << "self-adjointness " << sci(sa);
  ok = ok && sa <= c.tol("self_adjoint");
  if (has_observable(c.cfg, "g") && sc.model.kind != ModelKind::exp_nilpotent_group) {
    PhaseFunction g = build_observable(c.cfg, "g", sc);
    PhaseFunction fg = pf_product(f, g);
    auto pts = default_chart_points(sc, 3);
    Vec devs;
    for (double h : sc.hbar_list) {
      SymbolSamples st = star_product(sc, f, g, h, pts);
      SymbolSamples ex = sample_symbol(sc, fg, st);
      double m = 0;
      for (size_t i = 0; i < st.values.size(); ++i) m = std::max(m, std::abs(st.values[i] - ex.values[i]));
      devs.push_back(m);
    }
    bool dec = true;
    for (size_t i = 1; i < devs.size(); ++i) dec = dec && devs[i] < devs[i - 1];
    d << "; |f x g - fg| " << sci(devs.front()) << " -> " << sci(devs.back());
    ok = ok && dec;
  }
  if (!warn.empty()) d << "; warnings: " << warn.items.front();
  o.passed = ok;
  o.detail = d.str();
  return o;
}

// ---- sweep ----
bool is_halving(double a, double b) { return std::fabs(b - 0.5 * a) <= 1e-9 * a; }

SuiteOutcome suite_sweep(const Ctx& c) {
  if (c.finite()) return skipped("sweep", "finite pair groupoid has no quantization map");
  SuiteOutcome o{"sweep", false, false, {}};
  QuantizationScenario sc = build_scenario(c.cfg);
  if (!has_observable(c.cfg, "f") || !has_observable(c.cfg, "g"))
    throw Error(ErrorCode::config, "sweep needs observables f and g");
  PhaseFunction f = build_observable(c.cfg, "f", sc), g = build_observable(c.cfg, "g", sc);
  HarnessOptions ho;
  ho.norm = c.norm();
  ho.threads = c.opt.threads;
  SweepResult r = run_sweep(sc, f, g, sc.hbar_list, ho);
  std::vector<std::pair<std::string, bool>> flags;
  const auto& rows = r.rows;
  bool halving = true;
  for (size_t i = 1; i < rows.size(); ++i)
    if (is_halving(rows[i - 1].hbar, rows[i].hbar))
      halving = halving && rows[i].dirac_residual <= c.tol("dirac_ratio") * rows[i - 1].dirac_residual;
  flags.emplace_back("dirac_halving", halving);
  flags.emplace_back("dirac_final", rows.back().dirac_residual <= c.tol("dirac_final") * rows.front().dirac_residual);
  bool mdec = true;
  for (size_t i = 1; i < rows.size(); ++i) mdec = mdec && rows[i].mult_residual < rows[i - 1].mult_residual;
  flags.emplace_back("mult_decreasing", mdec);
  flags.emplace_back("mult_final", rows.back().mult_residual <= c.tol("mult_final") * rows.front().mult_residual);
  std::ostringstream d;
  d << "dirac " << sci(rows.front().dirac_residual) << " -> " << sci(rows.back().dirac_residual) << " slope "
    << sci(r.fit.slope) << "; mult " << sci(rows.front().mult_residual) << " -> " << sci(rows.back().mult_residual);
  if (has_observable(c.cfg, "b1") && has_observable(c.cfg, "b2")) {
    PhaseFunction b1 = build_observable(c.cfg, "b1", sc), b2 = build_observable(c.cfg, "b2", sc);
    SweepResult rb = run_sweep(sc, b1, b2, sc.hbar_list, ho);
    bool ok = true;
    double worst = 0;
    for (const auto& row : rb.rows) {
      ok = ok && row.dirac_residual <= c.tol("noise_factor") * row.noise_floor;
      worst = std::max(worst, row.noise_floor > 0 ? row.dirac_residual / row.noise_floor : 0.0);
    }
    flags.emplace_back("base_only_noise", ok);
    d << "; base-only residual/noise " << sci(worst);
  }
  if (!c.cfg.derivative_hbar_list.empty()) {
    bool ok = false;
    try {
      DerivativeCheck dc =
          commutator_derivative_check(sc, f, g, c.cfg.derivative_hbar_list, default_chart_points(sc, 5));
      ok = dc.deviation <= c.tol("derivative");
      d << "; derivative " << sci(dc.deviation);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::unsupported) throw;
      d << "; derivative error: " << e.what();
    }
    flags.emplace_back("derivative", ok);
  }
  if (c.writes()) {
    write_file(c.path(c.cfg.output_csv), sweep_csv(r));
    write_file(c.path(c.cfg.output_json), sweep_json(r, flags));
  }
  bool all = true;
  for (const auto& [name, v] : flags) {
    all = all && v;
    if (!v) d << "; FAILED " << name;
  }
  o.passed = all;
  o.detail = d.str();
  return o;
}

// ---- continuity ----
SuiteOutcome suite_continuity(const Ctx& c) {
  if (c.finite()) return skipped("continuity", "finite pair groupoid has no quantization map");
  SuiteOutcome o{"continuity", false, false, {}};
  QuantizationScenario sc = build_scenario(c.cfg);
  std::string key = has_observable(c.cfg, "h") ? "h" : "f";
  PhaseFunction f = build_observable(c.cfg, key, sc);
  Vec hs = c.cfg.continuity_hbar_list.empty() ? sc.hbar_list : c.cfg.continuity_hbar_list;
  HarnessOptions ho;
  ho.norm = c.norm();
  ho.threads = c.opt.threads;
  ContinuityScan s = field_continuity_scan(sc, f, hs, ho);
  double rel = s.sup > 0 ? s.deviation[s.deviation.size() - 2] / s.sup : 0.0;
  o.passed = s.decreasing && rel <= c.tol("continuity");
  std::ostringstream d;
  d << "observable " << key << " sup " << sci(s.sup) << " deviation " << sci(s.deviation.front()) << " -> "
    << sci(s.deviation[s.deviation.size() - 2]) << " (" << sci(rel) << " relative at hbar "
    << s.hbar[s.hbar.size() - 2] << ")" << (s.decreasing ? "" : "; not decreasing");
  if (c.writes()) {
    std::ostringstream csv;
    csv << "# all norms are reduced norms\nhbar,seminorm,deviation\n";
    for (size_t i = 0; i < s.hbar.size(); ++i)
      csv << g17(s.hbar[i]) << "," << g17(s.seminorm[i]) << "," << g17(s.deviation[i]) << "\n";
    write_file(c.path("continuity.csv"), csv.str());
  }
  o.detail = d.str();
  return o;
}

// ---- bch ----
SuiteOutcome suite_bch(const Ctx& c) {
  if (c.finite()) return skipped("bch", "finite pair groupoid has no local parametrization");
  SuiteOutcome o{"bch", false, false, {}};
  QuantizationScenario sc = build_scenario(c.cfg);
  LocalParametrization par = parametrization_for(sc.model);
  double pc = check_parametrization(par, sc.sf.chart.samples, c.seed);
  double cons = sc.bch_consistency();
  std::ostringstream d;
  bool ok = pc <= 1e-12 && cons <= c.tol("bch");
  d << "parametrization " << sci(pc) << " extraction-vs-structure " << sci(cons);
  if (sc.model.kind == ModelKind::exp_nilpotent_group && !sc.model.is_abelian()) {
    BchResult r = bch_extract(par, Vec{}, 1e-4);
    double dev = std::fabs(r.c(0, 1, 2) - 1.0);
    d << " c123 " << g17(r.c(0, 1, 2));
    ok = ok && dev <= c.tol("bch");
  }
  if (sc.model.kind == ModelKind::grid_pair) {
    double dev = 0;
    for (const auto& u : sc.sf.chart.samples) {
      BchResult r = bch_extract(par, u, 1e-4);
      dev = std::max({dev, std::fabs(r.a[0] - 1.0), std::fabs(r.c(0, 0, 0))});
    }
    d << " |a - I|, |c| " << sci(dev);
    ok = ok && dev <= c.tol("bch_pair");
  }
  StructureFunctions ex = structure_from_parametrization(par, sc.sf.chart, 1e-4);
  AxiomReport ar = check_axioms(ex, c.tol("axioms_fd"));
  d << "; extracted jacobi " << sci(ar.jacobi_residual) << " anchor " << sci(ar.anchor_residual);
  o.passed = ok && ar.pass;
  o.detail = d.str();
  return o;
}

}  // namespace

std::string SuiteOutcome::line() const {
  std::string tag = skipped ? "SKIP" : passed ? "PASS" : "FAIL";
  return tag + " " + suite + ": " + detail;
}

bool SuiteReport::passed() const {
  for (const auto& o : outcomes)
    if (!o.passed) return false;
  return true;
}

std::string SuiteReport::text() const {
  std::string s;
  for (const auto& o : outcomes) s += o.line().insert(5, "[" + scenario + "] ") + "\n";
  return s;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n = {"check-axioms", "fourier-selftest", "norms", "quantize",
                                             "sweep",        "continuity",       "bch"};
  return n;
}

bool is_suite_name(const std::string& s) {
  return s == "all" || std::find(suite_names().begin(), suite_names().end(), s) != suite_names().end();
}

double tolerance(const ScenarioConfig& cfg, const RunOptions& opt, const std::string& key) {
  auto it = cfg.tol.find(key);
  double v = it != cfg.tol.end() ? it->second : default_tolerances().at(key);
  return tolerance_is_ratio(key) ? v : v * opt.tol_scale;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "# scenario " << r.scenario << "; all norms are reduced norms\n";
  os << "hbar,dirac_residual,mult_residual,seminorm_f,seminorm_g,sup_norm_f\n";
  for (const auto& row : r.rows)
    os << g17(row.hbar) << "," << g17(row.dirac_residual) << "," << g17(row.mult_residual) << ","
       << g17(row.seminorm_f) << "," << g17(row.seminorm_g) << "," << g17(row.sup_norm_f) << "\n";
  return os.str();
}

std::string sweep_json(const SweepResult& r, const std::vector<std::pair<std::string, bool>>& flags) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["norms"] = "reduced";
  j["slope"] = r.fit.slope;
  j["fit_residual"] = r.fit.fit_residual;
  nlohmann::ordered_json pf = nlohmann::ordered_json::object();
  for (const auto& [k, v] : flags) pf[k] = v;
  j["pass_flags"] = pf;
  return j.dump(2) + "\n";
}

SuiteReport run_suite(const ScenarioConfig& cfg, const std::string& suite, const RunOptions& opt) {
  if (!is_suite_name(suite)) throw Error(ErrorCode::config, "unknown suite '" + suite + "'");
  if (!(opt.tol_scale > 0)) throw Error(ErrorCode::config, "tol-scale must be positive");
  if (opt.threads < 1) throw Error(ErrorCode::config, "threads must be at least 1");
  validate_config(cfg);
  if (!opt.out_dir.empty()) std::filesystem::create_directories(opt.out_dir);
  Ctx c{cfg, opt, opt.seed_set ? opt.seed : cfg.seed};
  SuiteReport rep;
  rep.scenario = cfg.name;
  std::vector<std::string> todo = suite == "all" ? suite_names() : std::vector<std::string>{suite};
  for (const auto& s : todo) {
    SuiteOutcome o;
    try {
      if (s == "check-axioms") o = suite_axioms(c);
      else if (s == "fourier-selftest") o = suite_fourier(c);
      else if (s == "norms") o = suite_norms(c);
      else if (s == "quantize") o = suite_quantize(c);
      else if (s == "sweep") o = suite_sweep(c);
      else if (s == "continuity") o = suite_continuity(c);
      else o = suite_bch(c);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::config) throw;
      o = SuiteOutcome{s, false, false, std::string(error_code_name(e.code())) + " error: " + e.what()};
    }
    rep.outcomes.push_back(std::move(o));
  }
  return rep;
}

}  // namespace sdq
