// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "sdq/config.hpp"
#include "sdq/quantize.hpp"

using namespace sdq;

namespace {

std::string scenario_path(const std::string& name) { return std::string(SDQ_SCENARIO_DIR) + "/" + name + ".cfg"; }

struct Loaded {
  ScenarioConfig cfg;
  QuantizationScenario sc;
  explicit Loaded(const std::string& name) : cfg(load_config(scenario_path(name))), sc(build_scenario(cfg)) {}
  PhaseFunction obs(const std::string& k) const { return build_observable(cfg, k, sc); }
};

// Random real Gaussian envelope in the model's phase space.
PhaseFunction random_real(const QuantizationScenario& sc, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-0.5, 0.5), S(0.6, 1.4);
  int n = sc.sf.n(), p = sc.sf.p();
  Vec q0(n), sq(n), e0(p), se(p);
  for (auto& v : q0) v = U(rng);
  for (auto& v : sq) v = 0.5 * S(rng);
  for (auto& v : e0) v = U(rng);
  for (auto& v : se) v = S(rng);
  if (sc.model.kind == ModelKind::exp_nilpotent_group) e0[2] = 4;  // keep the central variable away from 0
  if (sc.model.kind == ModelKind::transformation) q0[0] += 0.8;    // near the sampled circles
  return gaussian_envelope(n, p, S(rng), q0, sq, e0, se);
}

}  // namespace

TEST_CASE("star product on the Weyl scenario equals the Moyal product of Gaussians") {
  Loaded w("weyl-r1");
  oracle::Gaussian2 of{1, 0, 1, 0, 1}, og{1, 0.5, 1, -0.3, 1};
  std::vector<ChartPoint> pts;
  for (int k = -12; k <= 12; ++k) pts.push_back(ChartPoint{Vec{0.075 * 2 * k}});
  for (double h : {0.4, 0.2, 0.1}) {
    SymbolSamples s = star_product(w.sc, w.obs("f"), w.obs("g"), h, pts);
    double worst = 0;
    for (size_t i = 0; i < s.points.size(); ++i)
      for (size_t k = 0; k < s.fiber.size(); ++k)
        if (std::fabs(s.fiber[k]) <= 8)
          worst = std::max(worst, std::abs(s.at(i, k) - oracle::moyal_gaussian(of, og, h, s.points[i].base[0], s.fiber[k])));
    CAPTURE(h);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("Moyal oracle reduces to the pointwise product plus half the bracket") {
  oracle::Gaussian2 f{1, 0, 1, 0, 1}, g{1.3, 0.5, 0.8, -0.3, 1.2};
  double q = 0.3, p = -0.4, h = 1e-4;
  cplx m = oracle::moyal_gaussian(f, g, h, q, p);
  double fq = -q * f(q, p), fp = -p * f(q, p);
  double gq = -(q - 0.5) / 0.64 * g(q, p), gp = -(p + 0.3) / 1.44 * g(q, p);
  CHECK(std::fabs(m.real() - f(q, p) * g(q, p)) <= 1e-7);
  CHECK(std::fabs(m.imag() - 0.5 * h * (fq * gp - fp * gq)) <= 1e-10);
}

TEST_CASE("real observables quantize to self-adjoint elements") {
  std::mt19937_64 rng(17);
  for (const char* name : {"weyl-r1", "heisenberg-lp", "rotation-action"}) {
    Loaded l(name);
    CAPTURE(name);
    for (int t = 0; t < 3; ++t) {
      PhaseFunction f = random_real(l.sc, rng);
      for (double h : {0.4, 0.1}) CHECK(self_adjointness_defect(weyl_quantize(l.sc, f, h)) <= 1e-10);
    }
  }
}

TEST_CASE("conjugate symbols quantize to adjoints and the map is linear") {
  Loaded w("weyl-r1");
  PhaseFunction f = w.obs("f"), g = w.obs("g");
  PhaseFunction z = pf_linear(cplx(0.3, 0.7), f, cplx(-1.1, 0.2), g);
  const double h = 0.2;
  AlgebraElement Qz = weyl_quantize(w.sc, z, h);
  AlgebraElement lin = linear_combination(cplx(0.3, 0.7), weyl_quantize(w.sc, f, h), cplx(-1.1, 0.2),
                                          weyl_quantize(w.sc, g, h));
  CHECK(element_distance(Qz, lin) <= 1e-12);
  CHECK(element_distance(weyl_quantize(w.sc, pf_conj(z), h), involute(Qz)) <= 1e-12);
}

TEST_CASE("the hbar = 0 seminorm is the sup norm") {
  for (const char* name : {"weyl-r1", "heisenberg-lp", "rotation-action"}) {
    Loaded l(name);
    PhaseFunction f = l.obs("f");
    CHECK(seminorm(l.sc, f, 0.0) == sup_norm(l.sc, f));
  }
}

TEST_CASE("star product tends to the pointwise product") {
  for (const char* name : {"weyl-r1", "rotation-action"}) {
    Loaded l(name);
    CAPTURE(name);
    PhaseFunction f = l.obs("f"), g = l.obs("g");
    auto pts = default_chart_points(l.sc, 3);
    double prev = 1e300;
    for (double h : {0.4, 0.2, 0.1}) {
      SymbolSamples s = star_product(l.sc, f, g, h, pts);
      SymbolSamples e = sample_symbol(l.sc, pf_product(f, g), s);
      double m = 0;
      for (size_t i = 0; i < s.values.size(); ++i) m = std::max(m, std::abs(s.values[i] - e.values[i]));
      CHECK(m < prev);
      prev = m;
    }
  }
}

TEST_CASE("scenario validation") {
  FiberGrid g;
  g.N = 128;
  g.L = 12;
  CHECK_NOTHROW(QuantizationScenario::make("ok", GroupoidModel::grid_pair(-8, 8), SignConvention::weyl, g,
                                           {0.4, 0.2}).validate());
  CHECK_THROWS_AS(QuantizationScenario::make("up", GroupoidModel::grid_pair(-8, 8), SignConvention::weyl, g,
                                             {0.2, 0.4}).validate(),
                  Error);
  CHECK_THROWS_AS(QuantizationScenario::make("neg", GroupoidModel::grid_pair(-8, 8), SignConvention::weyl, g,
                                             {0.4, -0.1}).validate(),
                  Error);
  Loaded w("weyl-r1");
  CHECK(w.sc.bch_consistency() <= 1e-4);
  CHECK(w.sc.orientation() == 1);
}

TEST_CASE("quantized kernels are banded and Hermitian symmetric in the weights") {
  Loaded w("weyl-r1");
  AlgebraElement Q = weyl_quantize(w.sc, w.obs("f"), 0.1);
  REQUIRE(Q.rep == RepKind::kernel);
  CHECK(Q.kernel.width() < Q.kernel.n);
  Eigen::MatrixXcd D = Q.kernel.to_dense();
  CHECK((D - D.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
}
