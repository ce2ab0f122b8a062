// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sdq/suites.hpp"

using namespace sdq;

namespace {

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", v);
  return b;
}

struct Verdict {
  bool pass = true;
  std::ostringstream msg;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      msg << " [failed: " << what << "]";
    }
  }
};

struct Loaded {
  ScenarioConfig cfg;
  QuantizationScenario sc;
  explicit Loaded(const std::string& name)
      : cfg(load_config(std::string(SDQ_SCENARIO_DIR) + "/" + name + ".cfg")), sc(build_scenario(cfg)) {}
  PhaseFunction obs(const std::string& k) const { return build_observable(cfg, k, sc); }
};

int failures = 0;

void run(const char* id, const char* title, double budget_s, const std::function<void(Verdict&)>& body) {
  Verdict v;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.msg << " [error: " << e.what() << "]";
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && dt > budget_s) {
    v.pass = false;
    v.msg << " [over runtime budget " << budget_s << " s]";
  }
  if (!v.pass) ++failures;
  std::printf("%s %s %s:%s (%.2f s)\n", id, v.pass ? "PASS" : "FAIL", title, v.msg.str().c_str(), dt);
  std::fflush(stdout);
}

Box box2() { return Box{{-1.0, -1.0}, {1.0, 1.0}}; }

}  // namespace

int main() {
  run("AC1", "algebroid axioms", 1.0, [](Verdict& v) {
    double worst = 0, worst_fd = 0;
    for (auto sf : {sf_abelian(2, 2, box2()), sf_tangent(2, box2()), sf_heisenberg(), sf_action_rotation(box2())}) {
      AxiomReport r = check_axioms(sf, 1e-9);
      v.require(r.pass, sf.name + " analytic");
      worst = std::max({worst, r.jacobi_residual, r.anchor_residual});
      sf.mode = DerivativeMode::finite_difference;
      sf.da = nullptr;
      sf.dc = nullptr;
      AxiomReport f = check_axioms(sf, 1e-5);
      v.require(f.pass, sf.name + " finite-difference");
      worst_fd = std::max({worst_fd, f.jacobi_residual, f.anchor_residual});
    }
    StructureFunctions bad = sf_constant(0, 3, Box{}, {}, {{0, 1, 0, 1.0}, {1, 2, 0, 1.0}, {0, 2, 1, 1.0}});
    AxiomReport rb = check_axioms(bad, 1e-9);
    v.require(!rb.pass, "perturbed Jacobi rejected");
    v.msg << " analytic max " << sci(worst) << " (<= 1e-9), fd max " << sci(worst_fd)
          << " (<= 1e-5), perturbed Jacobi residual " << sci(rb.jacobi_residual) << " rejected";
  });

  run("AC2", "Fourier fidelity N=256 L=12", 1.0, [](Verdict& v) {
    FiberGrid g;
    g.N = 256;
    g.L = 12;
    PrimalFunction gauss = [](const double*, const double* xi) { return cplx(std::exp(-0.5 * xi[0] * xi[0])); };
    SampledFiberFunction s = sample_primal(gauss, g, {Vec{}});
    SampledFiberFunction F = fourier_forward(s, DensityWeight::lebesgue());
    SampledFiberFunction b = fourier_inverse(F, DensityWeight::lebesgue());
    double rt = 0, pair = 0;
    for (int k = 0; k < g.N; ++k) {
      rt = std::max(rt, std::abs(b.values[0][k] - s.values[0][k]));
      double th = g.theta(k);
      pair = std::max(pair, std::abs(F.values[0][k] - std::sqrt(2 * kPi) * std::exp(-0.5 * th * th)));
    }
    TransformRulesReport rr = check_transform_rules(gauss, g, {Vec{}}, DensityWeight::lebesgue(), 1e-6);
    v.require(rt <= 1e-8, "roundtrip");
    v.require(pair <= 1e-8, "Gaussian pair");
    v.require(rr.dual_derivative_residual <= 1e-6 && rr.primal_derivative_residual <= 1e-6, "transform rules");
    v.msg << " roundtrip " << sci(rt) << ", Gaussian pair " << sci(pair) << ", dual derivative " << sci(rr.dual_derivative_residual)
          << ", primal derivative " << sci(rr.primal_derivative_residual);
  });

  run("AC3", "convolution algebra finite-pair-16", 1.0, [](Verdict& v) {
    ScenarioConfig cfg = load_config(std::string(SDQ_SCENARIO_DIR) + "/finite-pair-16.cfg");
    GroupoidModel m = build_model(cfg);
    Vec w = m.unit_weights;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    double conv = 0, cstar = 0, svd = 0;
    for (int t = 0; t < 5; ++t) {
      Eigen::MatrixXcd A(16, 16), B(16, 16);
      for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
          A(i, j) = cplx(nd(rng), nd(rng));
          B(i, j) = cplx(nd(rng), nd(rng));
        }
      AlgebraElement a = make_kernel_element(ModelKind::finite_pair, BandedKernel::from_dense(A, w));
      AlgebraElement b = make_kernel_element(ModelKind::finite_pair, BandedKernel::from_dense(B, w));
      Eigen::MatrixXcd ref = oracle::weighted_product(A, B, w);
      conv = std::max(conv, (convolve(a, b).kernel.to_dense() - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff());
      double na = reduced_norm(a).value;
      cstar = std::max(cstar, std::fabs(reduced_norm(convolve(involute(a), a)).value - na * na) / (na * na));
      double o = oracle::dense_weighted_norm(A, w);
      svd = std::max(svd, std::fabs(na - o) / o);
    }
    v.require(conv <= 1e-14, "convolution");
    v.require(cstar <= 1e-8, "C*-identity");
    v.require(svd <= 1e-8, "norm vs SVD");
    v.msg << " convolution vs weighted product " << sci(conv) << " (relative to max entry), C*-identity "
          << sci(cstar) << ", norm vs dense SVD " << sci(svd);
  });

  run("AC4", "BCH and structure extraction", 1.0, [](Verdict& v) {
    GroupoidModel h = GroupoidModel::heisenberg_group(), g = GroupoidModel::grid_pair(-8, 8);
    BchResult bh = bch_extract(parametrization_for(h), Vec{}, 1e-4);
    double dc = std::fabs(bh.c(0, 1, 2) - 1.0);
    double pair = 0;
    for (double u : {-4.0, -1.0, 0.0, 2.0, 5.0}) {
      BchResult bg = bch_extract(parametrization_for(g), Vec{u}, 1e-4);
      pair = std::max({pair, std::fabs(bg.a[0] - 1.0), std::fabs(bg.c(0, 0, 0))});
    }
    AxiomReport ah = check_axioms(structure_from_parametrization(parametrization_for(h), sf_heisenberg().chart, 1e-4), 1e-5);
    AxiomReport ag = check_axioms(
        structure_from_parametrization(parametrization_for(g), ChartDomain::uniform(1, 1, {-4.0}, {4.0}, 5), 1e-4), 1e-5);
    v.require(dc <= 1e-4, "c123");
    v.require(pair <= 1e-6, "grid pair a = I, c = 0");
    v.require(ah.pass && ag.pass, "extracted axioms");
    v.msg << " |c123 - 1| " << sci(dc) << ", grid pair |a - I|, |c| " << sci(pair) << ", extracted axioms "
          << sci(std::max({ah.jacobi_residual, ah.anchor_residual, ag.jacobi_residual, ag.anchor_residual}));
  });

  run("AC5", "Moyal equivalence on weyl-r1", 30.0, [](Verdict& v) {
    Loaded w("weyl-r1");
    oracle::Gaussian2 of{1, 0, 1, 0, 1}, og{1, 0.5, 1, -0.3, 1};
    std::vector<ChartPoint> pts;
    for (int k = -20; k <= 20; ++k) pts.push_back(ChartPoint{Vec{0.075 * k}});
    for (double hb : {0.4, 0.2, 0.1}) {
      SymbolSamples s = star_product(w.sc, w.obs("f"), w.obs("g"), hb, pts);
      double worst = 0;
      for (size_t i = 0; i < s.points.size(); ++i)
        for (size_t k = 0; k < s.fiber.size(); ++k)
          if (std::fabs(s.fiber[k]) <= 8)
            worst = std::max(worst, std::abs(s.at(i, k) - oracle::moyal_gaussian(of, og, hb, s.points[i].base[0], s.fiber[k])));
      v.require(worst <= 1e-6, "hbar " + std::to_string(hb));
      v.msg << " hbar " << hb << ": " << sci(worst);
    }
  });

  // Both criteria read the same sweeps; the runtime budget covers the pair.
  std::vector<std::pair<std::string, SweepResult>> sweeps;
  run("AC6", "Dirac condition", 120.0, [&](Verdict& v) {
    for (const char* name : {"weyl-r1", "heisenberg-lp"}) {
      Loaded l(name);
      HarnessOptions ho;
      SweepResult r = run_sweep(l.sc, l.obs("f"), l.obs("g"), l.sc.hbar_list, ho);
      sweeps.emplace_back(name, r);
      const auto& R = r.rows;
      double worst_ratio = 0;
      bool ddec = true;
      for (size_t i = 1; i < R.size(); ++i) {
        worst_ratio = std::max(worst_ratio, R[i].dirac_residual / R[i - 1].dirac_residual);
        ddec = ddec && R[i].dirac_residual < R[i - 1].dirac_residual;
      }
      double dfin = R.back().dirac_residual / R.front().dirac_residual;
      v.require(worst_ratio <= 0.7, std::string(name) + " halving ratio");
      v.require(ddec, std::string(name) + " strictly decreasing");
      v.require(dfin <= 0.15, std::string(name) + " final/initial");
      v.msg << " " << name << ": halving ratio max " << sci(worst_ratio) << ", final/initial " << sci(dfin)
            << ", slope " << sci(r.fit.slope) << ";";
      if (has_observable(l.cfg, "b1")) {
        SweepResult b = run_sweep(l.sc, l.obs("b1"), l.obs("b2"), l.sc.hbar_list, ho);
        double worst = 0;
        for (const auto& row : b.rows) worst = std::max(worst, row.dirac_residual / row.noise_floor);
        v.require(worst <= 10, std::string(name) + " base-only noise floor");
        v.msg << " base-only residual/noise floor " << sci(worst) << ";";
      }
    }
  });

  run("AC7", "asymptotic multiplicativity", 0, [&](Verdict& v) {
    v.require(sweeps.size() == 2, "sweeps available");
    for (const auto& [name, r] : sweeps) {
      const auto& R = r.rows;
      bool mdec = true;
      for (size_t i = 1; i < R.size(); ++i) mdec = mdec && R[i].mult_residual < R[i - 1].mult_residual;
      double mfin = R.back().mult_residual / R.front().mult_residual;
      v.require(mdec, name + " strictly decreasing");
      v.require(mfin <= 0.25, name + " final/initial");
      v.msg << " " << name << ": " << sci(R.front().mult_residual) << " -> " << sci(R.back().mult_residual)
            << ", final/initial " << sci(mfin) << ";";
    }
  });

  run("AC8", "field continuity on weyl-r1", 60.0, [](Verdict& v) {
    Loaded w("weyl-r1");
    ContinuityScan s = field_continuity_scan(w.sc, w.obs("h"), w.cfg.continuity_hbar_list, {});
    size_t last = s.hbar.size() - 2;  // entry before the appended hbar = 0
    double rel = s.deviation[last] / s.sup;
    v.require(s.decreasing, "decreasing");
    v.require(s.hbar[last] == 0.01 && rel <= 0.05, "5% at hbar 0.01");
    v.msg << " deviation " << sci(s.deviation.front() / s.sup) << " -> " << sci(rel) << " of sup at hbar "
          << s.hbar[last] << (s.decreasing ? ", decreasing" : ", not decreasing");
  });

  run("AC9", "commutator derivative on weyl-r1", 30.0, [](Verdict& v) {
    Loaded w("weyl-r1");
    DerivativeCheck d = commutator_derivative_check(w.sc, w.obs("f"), w.obs("g"), w.cfg.derivative_hbar_list,
                                                    default_chart_points(w.sc, 5));
    v.require(d.deviation <= 1e-3, "extrapolated deviation");
    v.msg << " extrapolated " << sci(d.deviation) << ", raw at smallest hbar " << sci(d.raw_deviation.back());
  });

  run("AC10", "self-adjointness of real observables", 0, [](Verdict& v) {
    double worst = 0;
    int count = 0;
    for (const char* name : {"weyl-r1", "heisenberg-lp", "rotation-action"}) {
      Loaded l(name);
      for (const auto& [key, spec] : l.cfg.observables) {
        PhaseFunction f = l.obs(key);
        if (!f.real_valued) continue;
        for (double hb : l.sc.hbar_list) {
          worst = std::max(worst, self_adjointness_defect(weyl_quantize(l.sc, f, hb)));
          ++count;
        }
      }
    }
    v.require(worst <= 1e-10, "defect");
    v.msg << " max defect " << sci(worst) << " over " << count << " quantized observables";
  });

  std::printf("%s\n", failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED");
  return failures ? 1 : 0;
}
