// SPDX-License-Identifier: Apache-2.0
// Test-side reference computations.  Nothing here calls into the library numerics.
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;

// amp * exp(-(q-q0)^2/(2 sq^2) - (p-p0)^2/(2 sp^2))
struct Gaussian2 {
  double amp = 1, q0 = 0, sq = 1, p0 = 0, sp = 1;
  double operator()(double q, double p) const;
};

// Moyal product of two phase-space Gaussians, evaluated through the closed-form
// four dimensional Gaussian integral (f * g)(z) = (pi hbar)^-2 int f(z+z1) g(z+z2) e^{2i/hbar (q1 p2 - p1 q2)}.
// Normalized so that q * p - p * q = i hbar.
cplx moyal_gaussian(const Gaussian2& f, const Gaussian2& g, double hbar, double q, double p);

// Largest singular value of W^1/2 A W^1/2 by dense SVD.
double dense_weighted_norm(const Eigen::MatrixXcd& A, const std::vector<double>& w);

// int f(x) e^{-i theta x} dx over [-a, a] by composite Simpson with n (even) panels.
cplx simpson_forward(const std::function<cplx(double)>& f, double theta, double a, int n);

// Weighted convolution (A W B) by explicit triple loop.
Eigen::MatrixXcd weighted_product(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, const std::vector<double>& w);

// Heisenberg group law in exponential coordinates by explicit 3x3 upper-triangular matrices.
std::vector<double> heisenberg_product(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oracle
