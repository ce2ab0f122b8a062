// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sdq/fourier.hpp"
#include "sdq/observables.hpp"

using namespace sdq;

namespace {

FiberGrid grid(int p, int N, double L) {
  FiberGrid g;
  g.p = p;
  g.N = N;
  g.L = L;
  return g;
}

PrimalFunction gaussian(int p, double shift = 0) {
  return [p, shift](const double*, const double* xi) {
    double r2 = 0;
    for (int d = 0; d < p; ++d) r2 += (xi[d] - shift) * (xi[d] - shift);
    return cplx(std::exp(-0.5 * r2), 0.0);
  };
}

double max_diff(const CVec& a, const CVec& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("grid geometry") {
  FiberGrid g = grid(1, 256, 12);
  CHECK(g.dxi() == doctest::Approx(24.0 / 256));
  CHECK(g.xi(128) == 0.0);
  CHECK(g.theta(0) == doctest::Approx(-128 * kPi / 12));
  CHECK(g.dxi() * g.dtheta() * g.N == doctest::Approx(2 * kPi));
  CHECK_THROWS_AS(grid(1, 100, 12).validate(), Error);
  CHECK_THROWS_AS(grid(0, 64, 12).validate(), Error);
}

TEST_CASE("Gaussian roundtrip and transform pair at N = 256, L = 12") {
  for (int p : {1, 2}) {
    FiberGrid g = grid(p, p == 1 ? 256 : 64, 12);
    std::vector<Vec> base{Vec{}};
    SampledFiberFunction s = sample_primal(gaussian(p), g, base);
    SampledFiberFunction F = fourier_forward(s, DensityWeight::lebesgue());
    SampledFiberFunction back = fourier_inverse(F, DensityWeight::lebesgue());
    CHECK(max_diff(back.values[0], s.values[0]) <= 1e-8);
    std::vector<double> th(p);
    double worst = 0;
    for (size_t i = 0; i < g.total(); ++i) {
      g.dual_point(i, th.data());
      double r2 = 0;
      for (double t : th) r2 += t * t;
      worst = std::max(worst, std::abs(F.values[0][i] - std::pow(2 * kPi, 0.5 * p) * std::exp(-0.5 * r2)));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("FFT agrees with Simpson quadrature of the defining integral") {
  FiberGrid g = grid(1, 256, 12);
  auto f = [](double x) { return cplx(x * std::exp(-0.5 * x * x) * std::cos(1.3 * x), 0.2 * std::exp(-x * x)); };
  PrimalFunction pf = [&](const double*, const double* xi) { return f(xi[0]); };
  SampledFiberFunction F = fourier_forward(sample_primal(pf, g, {Vec{}}), DensityWeight::lebesgue());
  double worst = 0;
  for (int k = 64; k < 192; k += 7) {
    cplx ref = oracle::simpson_forward(f, g.theta(k), 12, 20000);
    worst = std::max(worst, std::abs(F.values[0][k] - ref));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("density weight scales forward and inverse reciprocally") {
  FiberGrid g = grid(1, 128, 12);
  SampledFiberFunction s = sample_primal(gaussian(1, 0.4), g, {Vec{}});
  DensityWeight mu = DensityWeight::constant(2.5);
  SampledFiberFunction F1 = fourier_forward(s, DensityWeight::lebesgue());
  SampledFiberFunction F2 = fourier_forward(s, mu);
  for (size_t i = 0; i < g.total(); ++i) CHECK(std::abs(F2.values[0][i] - 2.5 * F1.values[0][i]) <= 1e-12);
  CHECK(max_diff(fourier_inverse(F2, mu).values[0], s.values[0]) <= 1e-12);
  CHECK_THROWS_AS(DensityWeight::constant(-1.0), Error);
}

TEST_CASE("row transforms match direct sums") {
  FiberGrid g = grid(1, 64, 8);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  CVec in(64), out(64);
  for (auto& v : in) v = cplx(nd(rng), nd(rng));
  fft_inverse_row(g, in.data(), out.data(), 1.0);
  for (int k = 0; k < 64; k += 5) {
    cplx ref = 0;
    for (int j = 0; j < 64; ++j) ref += in[j] * std::exp(cplx(0, g.theta(j) * g.xi(k)));
    CHECK(std::abs(out[k] - ref) <= 1e-10);
    double x = g.xi(k);
    CHECK(std::abs(direct_inverse_at(g, in.data(), &x, 1.0) - ref * g.dtheta() / (2 * kPi)) <= 1e-10);
  }
}

TEST_CASE("dft_nd is invertible up to the size factor") {
  std::vector<int> dims{8, 4, 2};
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  CVec a(64), A(64), b(64);
  for (auto& v : a) v = cplx(nd(rng), nd(rng));
  dft_nd(dims, a.data(), A.data(), -1);
  dft_nd(dims, A.data(), b.data(), +1);
  for (size_t i = 0; i < 64; ++i) CHECK(std::abs(b[i] / 64.0 - a[i]) <= 1e-13);
  CHECK_THROWS_AS(dft_nd(dims, a.data(), a.data(), -1), Error);
}

TEST_CASE("differentiation and multiplication rules") {
  for (int p : {1, 2}) {
    FiberGrid g = grid(p, p == 1 ? 256 : 64, 12);
    TransformRulesReport r = check_transform_rules(gaussian(p, 0.3), g, {Vec{}}, DensityWeight::lebesgue(), 1e-6);
    CHECK(r.pass);
    CHECK(r.dual_derivative_residual <= 1e-6);
    CHECK(r.primal_derivative_residual <= 1e-6);
  }
}

TEST_CASE("fiber convolution of two Gaussians") {
  FiberGrid g = grid(1, 256, 12);
  SampledFiberFunction s = sample_primal(gaussian(1), g, {Vec{}});
  SampledFiberFunction c = fiber_convolve(s, s, DensityWeight::lebesgue());
  double worst = 0;
  for (int k = 0; k < g.N; ++k) {
    double x = g.xi(k);
    worst = std::max(worst, std::abs(c.values[0][k] - std::sqrt(kPi) * std::exp(-0.25 * x * x)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("Paley-Wiener projection leaves a band-limited inverse transform") {
  FiberGrid g = grid(1, 256, 12);
  PhaseFunction phi = gaussian_envelope(0, 1, 1.0, {}, {}, {0.0}, {0.5});
  SampledFiberFunction P = project_paley_wiener(phi, g, {Vec{}}, 2.0);
  SampledFiberFunction x = fourier_inverse(P, DensityWeight::lebesgue());
  double outside = 0;
  for (int k = 0; k < g.N; ++k)
    if (std::fabs(g.xi(k)) > 4.0 + 1e-9) outside = std::max(outside, std::abs(x.values[0][k]));
  CHECK(outside <= 1e-12);
  CHECK_THROWS_AS(project_paley_wiener(phi, g, {Vec{}}, 6.0), Error);
}

TEST_CASE("truncation at the grid edge is reported") {
  FiberGrid g = grid(1, 64, 4);
  SampledFiberFunction s = sample_primal(gaussian(1), g, {Vec{}});
  for (auto& v : s.values[0]) v = 1.0;
  TransformReport rep;
  fourier_forward(s, DensityWeight::lebesgue(), &rep);
  CHECK_FALSE(rep.warnings.empty());
}
