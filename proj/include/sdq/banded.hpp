// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "sdq/common.hpp"

namespace sdq {

// Integral-operator kernel on a weighted point set, stored by diagonals:
// entry (i, j) lives at offset d = j - i, lo <= d <= hi.  The operator is
// (K phi)_i = sum_j K(i, j) w_j phi_j.
struct BandedKernel {
  int n = 0;
  int lo = 0, hi = -1;
  CVec data;
  Vec w;
  // Periodic kernels index columns modulo n (circulant-banded, used for Bloch cells).
  bool periodic = false;

  int width() const { return hi >= lo ? hi - lo + 1 : 0; }
  // Storage slot of entry (i, j), or -1 outside the band.
  long slot(int i, int j) const {
    if (i < 0 || j < 0 || i >= n || j >= n) return -1;
    int d = j - i;
    if (periodic) d = ((d - lo) % n + n) % n + lo;
    if (d < lo || d > hi) return -1;
    return static_cast<long>(i) * width() + (d - lo);
  }
  // Column reached from row i at offset d, or -1.
  int column(int i, int d) const {
    int j = i + d;
    if (periodic) return ((j % n) + n) % n;
    return (j >= 0 && j < n) ? j : -1;
  }
  bool in_band(int i, int j) const { return slot(i, j) >= 0; }
  cplx at(int i, int j) const {
    long s = slot(i, j);
    return s >= 0 ? data[s] : cplx(0);
  }
  cplx& ref(int i, int j) { return data[slot(i, j)]; }

  static BandedKernel zeros(int n, int lo, int hi, Vec w, bool periodic = false);
  static BandedKernel from_dense(const Eigen::MatrixXcd& K, Vec w);
  Eigen::MatrixXcd to_dense() const;

  void apply(const cplx* x, cplx* y) const;
  // y = K^H-type adjoint operator on L^2(w): (K* x)_i = sum_j conj(K(j,i)) w_j x_j
  void apply_adjoint(const cplx* x, cplx* y) const;
  BandedKernel adjoint() const;
  // Drop outer diagonals whose entries are all below rel * max|K|; keeps the band symmetric about 0 when it was.
  void trim(double rel);
  double max_abs() const;
  // Schur-test upper bound on the L^2(w) operator norm.
  double schur_bound() const;
};

BandedKernel compose(const BandedKernel& A, const BandedKernel& B);
BandedKernel axpby(cplx a, const BandedKernel& A, cplx b, const BandedKernel& B);
double max_abs_diff(const BandedKernel& A, const BandedKernel& B);

struct NormOptions {
  double tol = 1e-9;
  double abs_tol = 0;  // also accept changes below this absolute size
  int max_iter = 10000;
  int dense_fallback_max = 2048;  // 0 disables the dense eigensolve for slowly converging kernels
  std::uint64_t seed = 20240917ULL;
};

struct NormResult {
  double value = 0;
  int iterations = 0;
  double residual = 0;
  bool dense = false;  // value came from the dense fallback
};

// Power iteration on (W^1/2 K W^1/2)^H (W^1/2 K W^1/2); throws ConvergenceError at the cap.
NormResult operator_norm(const BandedKernel& K, const NormOptions& opt = {});

// Flat binary export: text header line "sdq-kernel <rows> <cols> complex128-le\n", then
// row-major interleaved (re, im) little-endian doubles.
void write_kernel_binary(const std::string& path, const Eigen::MatrixXcd& K);
Eigen::MatrixXcd read_kernel_binary(const std::string& path);

}  // namespace sdq
