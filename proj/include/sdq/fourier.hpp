// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "sdq/algebroid.hpp"
#include "sdq/common.hpp"

namespace sdq {

// Primal points xi_k = (k - N/2) * dxi on [-L, L); dual points theta_k = (k - N/2) * pi / L.
struct FiberGrid {
  int p = 1;
  double L = 12.0;
  int N = 256;

  double dxi() const { return 2.0 * L / N; }
  double dtheta() const { return kPi / L; }
  double xi(int k) const { return (k - N / 2) * dxi(); }
  double theta(int k) const { return (k - N / 2) * dtheta(); }
  double dual_half_width() const { return (N / 2) * dtheta(); }
  size_t total() const;
  void validate() const;
  // Multi-index of a flat index (axis 0 fastest).
  void unflatten(size_t idx, int* k) const;
  void primal_point(size_t idx, double* xi_out) const;
  void dual_point(size_t idx, double* th_out) const;
};

struct DensityWeight {
  std::function<double(const double* u)> mu_e;
  double operator()(const double* u) const { return mu_e ? mu_e(u) : 1.0; }
  double dual(const double* u) const { return 1.0 / (*this)(u); }
  static DensityWeight lebesgue() { return DensityWeight{}; }
  static DensityWeight constant(double c);
};

enum class FiberSide { primal, dual };

struct SampledFiberFunction {
  FiberGrid grid;
  std::vector<Vec> base_points;
  FiberSide side = FiberSide::primal;
  std::vector<CVec> values;  // one row of grid.total() samples per base point

  void validate() const;
};

struct TransformReport {
  Warnings warnings;
};

// Continuum-normalized transforms, batched over base points.
SampledFiberFunction fourier_forward(const SampledFiberFunction& f, const DensityWeight& mu,
                                     TransformReport* rep = nullptr);
SampledFiberFunction fourier_inverse(const SampledFiberFunction& g, const DensityWeight& mu,
                                     TransformReport* rep = nullptr);

// Raw single-row transforms (p-dimensional, row of grid.total() samples) with weight factor.
void fft_forward_row(const FiberGrid& g, const cplx* in, cplx* out, double weight);
void fft_inverse_row(const FiberGrid& g, const cplx* in, cplx* out, double weight);

// Unnormalized DFT over a flat array with axis 0 fastest; sign -1 forward, +1 backward.
void dft_nd(const std::vector<int>& dims, const cplx* in, cplx* out, int sign);

// Direct quadrature at arbitrary points (reference path; O(N^p) per point).
cplx direct_forward_at(const FiberGrid& g, const cplx* primal_row, const double* theta, double mu_e);
cplx direct_inverse_at(const FiberGrid& g, const cplx* dual_row, const double* xi, double mu_e);

// Sample a closed-form dual function on base points x dual grid.
SampledFiberFunction sample_dual(const PhaseFunction& phi, const FiberGrid& g, const std::vector<Vec>& base);
using PrimalFunction = std::function<cplx(const double* u, const double* xi)>;
SampledFiberFunction sample_primal(const PrimalFunction& f, const FiberGrid& g, const std::vector<Vec>& base);

struct TransformRulesReport {
  double dual_derivative_residual = 0;  // d(hat f)/d eps_i = -i (xi_i f)^
  double primal_derivative_residual = 0;  // i theta_k hat f = (df/d lambda_k)^
  double tol = 0;
  bool pass = false;
};
TransformRulesReport check_transform_rules(const PrimalFunction& f, const FiberGrid& g, const std::vector<Vec>& base,
                                           const DensityWeight& mu, double tol);

// Smooth radial profile: 1 on r <= r0, 0 on r >= r1, exp(-1/t) transition.
double smooth_step_down(double r, double r0, double r1);

// Band-limited surrogate: F( chi_R * F^{-1} phi ), chi_R = 1 on |xi| <= R, 0 beyond 2R.
SampledFiberFunction project_paley_wiener(const PhaseFunction& phi, const FiberGrid& g, const std::vector<Vec>& base,
                                          double R, const DensityWeight& mu = DensityWeight::lebesgue());

// Fiberwise convolution (f * g)(xi) = int f(xi - eta) g(eta) mu deta on the primal grid.
SampledFiberFunction fiber_convolve(const SampledFiberFunction& f, const SampledFiberFunction& g,
                                    const DensityWeight& mu);

}  // namespace sdq
