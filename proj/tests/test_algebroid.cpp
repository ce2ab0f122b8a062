// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "sdq/algebroid.hpp"
#include "sdq/observables.hpp"

using namespace sdq;

namespace {

Box box2() { return Box{{-1.0, -1.0}, {1.0, 1.0}}; }

// [e1,e2] = e1, [e2,e3] = e1, [e1,e3] = e2 violates Jacobi on (e1, e2, e3).
StructureFunctions broken_jacobi() {
  return sf_constant(0, 3, Box{}, {}, {{0, 1, 0, 1.0}, {1, 2, 0, 1.0}, {0, 2, 1, 1.0}});
}

}  // namespace

TEST_CASE("builtin structure functions satisfy the axioms analytically") {
  for (const auto& sf : {sf_abelian(2, 2, box2()), sf_tangent(2, box2()), sf_heisenberg(), sf_action_rotation(box2())}) {
    CAPTURE(sf.name);
    AxiomReport r = check_axioms(sf, 1e-9);
    CHECK(r.pass);
    CHECK(r.jacobi_residual <= 1e-9);
    CHECK(r.anchor_residual <= 1e-9);
  }
}

TEST_CASE("finite-difference derivatives also pass at the looser tolerance") {
  for (auto sf : {sf_tangent(2, box2()), sf_action_rotation(box2())}) {
    sf.mode = DerivativeMode::finite_difference;
    sf.da = nullptr;
    sf.dc = nullptr;
    CHECK(check_axioms(sf, 1e-5).pass);
  }
}

TEST_CASE("a bracket violating Jacobi is rejected") {
  AxiomReport r = check_axioms(broken_jacobi(), 1e-9);
  CHECK_FALSE(r.pass);
  CHECK(r.jacobi_residual > 0.1);
}

TEST_CASE("an anchor that is not a homomorphism is rejected") {
  // rho(e1) = d/du, [e1, e2] = e1: rho([e1, e2]) != [rho e1, rho e2] = 0
  StructureFunctions sf = sf_constant(1, 2, Box{{-1.0}, {1.0}}, {1.0, 0.0}, {{0, 1, 0, 1.0}});
  AxiomReport r = check_axioms(sf, 1e-9);
  CHECK_FALSE(r.pass);
  CHECK(r.anchor_residual > 0.1);
}

TEST_CASE("Heisenberg structure constants are c_123 = 1 only") {
  StructureFunctions sf = sf_heisenberg();
  Tensor3 c = sf.c_at(nullptr);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double want = (i == 0 && j == 1 && k == 2) ? 1 : (i == 1 && j == 0 && k == 2) ? -1 : 0;
        CHECK(c(i, j, k) == want);
      }
}

TEST_CASE("constant tables reject bad indices") {
  CHECK_THROWS_AS(sf_constant(0, 2, Box{}, {}, {{0, 2, 0, 1.0}}), Error);
  CHECK_THROWS_AS(sf_constant(0, 2, Box{}, {}, {{1, 1, 0, 1.0}}), Error);
  CHECK_THROWS_AS(sf_constant(1, 2, Box{{0.0}, {1.0}}, {1.0}, {}), Error);
}

TEST_CASE("dual Poisson bracket: antisymmetry and Leibniz rule at random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-0.9, 0.9);
  struct Case {
    StructureFunctions sf;
    int n, p;
  };
  std::vector<Case> cases = {{sf_tangent(1, Box{{-1.0}, {1.0}}), 1, 1},
                             {sf_heisenberg(), 0, 3},
                             {sf_action_rotation(box2()), 2, 1}};
  for (const auto& cs : cases) {
    CAPTURE(cs.sf.name);
    Vec q0(cs.n, 0.1), sq(cs.n, 0.8), e0(cs.p, -0.2), se(cs.p, 1.1);
    PhaseFunction f = gaussian_envelope(cs.n, cs.p, 1.0, q0, sq, e0, se);
    PhaseFunction g = gaussian_envelope(cs.n, cs.p, 0.7, Vec(cs.n, -0.3), sq, Vec(cs.p, 0.4), se);
    PhaseFunction h = gaussian_envelope(cs.n, cs.p, 1.3, Vec(cs.n, 0.2), Vec(cs.n, 1.4), Vec(cs.p, 0.1), Vec(cs.p, 0.9));
    PhaseFunction fg = poisson_bracket_dual(cs.sf, f, g), gf = poisson_bracket_dual(cs.sf, g, f);
    PhaseFunction lhs = poisson_bracket_dual(cs.sf, f, pf_product(g, h));
    PhaseFunction fh = poisson_bracket_dual(cs.sf, f, h);
    for (int t = 0; t < 20; ++t) {
      Vec u(cs.n), e(cs.p);
      for (auto& x : u) x = U(rng);
      for (auto& x : e) x = 2 * U(rng);
      CHECK(std::abs(fg(u.data(), e.data()) + gf(u.data(), e.data())) <= 1e-12);
      cplx rhs = g(u.data(), e.data()) * fh(u.data(), e.data()) + h(u.data(), e.data()) * fg(u.data(), e.data());
      CHECK(std::abs(lhs(u.data(), e.data()) - rhs) <= 1e-9);
    }
  }
}

TEST_CASE("tangent bracket of position and momentum") {
  // {q, p} = -1 with the default sign, +1 with the flipped one.
  StructureFunctions sf = sf_tangent(1, Box{{-2.0}, {2.0}});
  PhaseFunction q = coordinate_function(1, 1, 0), p = coordinate_function(1, 1, 1);
  double u = 0.3, e = -0.7;
  cplx b4 = poisson_bracket_dual(sf, q, p, SignConvention::standard)(&u, &e);
  cplx b10 = poisson_bracket_dual(sf, q, p, SignConvention::weyl)(&u, &e);
  CHECK(std::abs(b4 + b10) <= 1e-14);
  CHECK(std::abs(std::abs(b4) - 1.0) <= 1e-12);
}
