// SPDX-License-Identifier: Apache-2.0
#include "sdq/banded.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace sdq {

BandedKernel BandedKernel::zeros(int n, int lo, int hi, Vec w, bool periodic) {
  if (static_cast<int>(w.size()) != n) throw Error(ErrorCode::structural, "kernel weights must have n entries");
  BandedKernel K;
  K.n = n;
  K.periodic = periodic;
  if (periodic) {
    K.lo = lo;
    K.hi = std::min(hi, lo + n - 1);  // every residue at most once
  } else {
    K.lo = std::max(lo, -(n - 1));
    K.hi = std::min(hi, n - 1);
  }
  if (K.hi < K.lo) K.hi = K.lo - 1;
  K.data.assign(static_cast<size_t>(n) * K.width(), cplx(0));
  K.w = std::move(w);
  return K;
}

BandedKernel BandedKernel::from_dense(const Eigen::MatrixXcd& M, Vec w) {
  if (M.rows() != M.cols()) throw Error(ErrorCode::structural, "kernel matrix must be square");
  const int n = static_cast<int>(M.rows());
  BandedKernel K = zeros(n, -(n - 1), n - 1, std::move(w));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) K.ref(i, j) = M(i, j);
  return K;
}

Eigen::MatrixXcd BandedKernel::to_dense() const {
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  const int W = width();
  for (int i = 0; i < n; ++i)
    for (int d = lo; d <= hi; ++d) {
      int j = column(i, d);
      if (j >= 0) M(i, j) = data[static_cast<size_t>(i) * W + (d - lo)];
    }
  return M;
}

void BandedKernel::apply(const cplx* x, cplx* y) const {
  const int W = width();
  if (periodic) {
    for (int i = 0; i < n; ++i) {
      const cplx* row = data.data() + static_cast<size_t>(i) * W;
      cplx acc = 0;
      for (int d = lo; d <= hi; ++d) {
        int j = column(i, d);
        acc += row[d - lo] * (w[j] * x[j]);
      }
      y[i] = acc;
    }
    return;
  }
  for (int i = 0; i < n; ++i) {
    int j0 = std::max(0, i + lo), j1 = std::min(n - 1, i + hi);
    const cplx* row = data.data() + static_cast<size_t>(i) * W - lo - i;
    cplx acc = 0;
    for (int j = j0; j <= j1; ++j) acc += row[j] * (w[j] * x[j]);
    y[i] = acc;
  }
}

void BandedKernel::apply_adjoint(const cplx* x, cplx* y) const {
  const int W = width();
  for (int i = 0; i < n; ++i) y[i] = 0;
  if (periodic) {
    for (int j = 0; j < n; ++j) {
      const cplx* row = data.data() + static_cast<size_t>(j) * W;
      const cplx xj = w[j] * x[j];
      for (int d = lo; d <= hi; ++d) y[column(j, d)] += std::conj(row[d - lo]) * xj;
    }
    return;
  }
  for (int j = 0; j < n; ++j) {
    int i0 = std::max(0, j + lo), i1 = std::min(n - 1, j + hi);
    const cplx* row = data.data() + static_cast<size_t>(j) * W - lo - j;
    const cplx xj = w[j] * x[j];
    for (int i = i0; i <= i1; ++i) y[i] += std::conj(row[i]) * xj;
  }
}

BandedKernel BandedKernel::adjoint() const {
  BandedKernel A = zeros(n, -hi, -lo, w, periodic);
  const int W = width();
  for (int i = 0; i < n; ++i)
    for (int d = lo; d <= hi; ++d) {
      int j = column(i, d);
      if (j >= 0) A.ref(j, i) = std::conj(data[static_cast<size_t>(i) * W + (d - lo)]);
    }
  return A;
}

double BandedKernel::max_abs() const {
  double m = 0;
  for (const auto& v : data) m = std::max(m, std::abs(v));
  return m;
}

void BandedKernel::trim(double rel) {
  const int W = width();
  if (W == 0) return;
  double thr = rel * max_abs();
  std::vector<double> dmax(W, 0.0);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < W; ++t) dmax[t] = std::max(dmax[t], std::abs(data[static_cast<size_t>(i) * W + t]));
  int nlo = hi + 1, nhi = lo - 1;
  for (int t = 0; t < W; ++t)
    if (dmax[t] > thr) {
      nlo = std::min(nlo, lo + t);
      nhi = std::max(nhi, lo + t);
    }
  if (nlo > nhi) {
    *this = zeros(n, 0, 0, w, periodic);
    return;
  }
  if (lo == -hi) {  // symmetric bands stay symmetric
    int r = std::max(-nlo, nhi);
    nlo = -r;
    nhi = r;
  }
  if (nlo == lo && nhi == hi) return;
  BandedKernel T = zeros(n, nlo, nhi, w, periodic);
  const int WT = T.width();
  for (int i = 0; i < n; ++i)
    for (int d = T.lo; d <= T.hi; ++d) T.data[static_cast<size_t>(i) * WT + (d - T.lo)] = data[static_cast<size_t>(i) * W + (d - lo)];
  *this = std::move(T);
}

double BandedKernel::schur_bound() const {
  Vec rs(n, 0.0), cs(n, 0.0), sw(n);
  for (int i = 0; i < n; ++i) sw[i] = std::sqrt(w[i]);
  const int W = width();
  for (int i = 0; i < n; ++i)
    for (int d = lo; d <= hi; ++d) {
      int j = column(i, d);
      if (j < 0) continue;
      double a = std::abs(data[static_cast<size_t>(i) * W + (d - lo)]) * sw[i] * sw[j];
      rs[i] += a;
      cs[j] += a;
    }
  double r = 0, c = 0;
  for (int i = 0; i < n; ++i) {
    r = std::max(r, rs[i]);
    c = std::max(c, cs[i]);
  }
  return std::sqrt(r * c);
}

namespace {
void check_same_space(const BandedKernel& A, const BandedKernel& B, const char* what) {
  if (A.n != B.n) throw Error(ErrorCode::structural, std::string(what) + ": kernel sizes differ");
  if (A.periodic != B.periodic) throw Error(ErrorCode::structural, std::string(what) + ": periodic and open kernels mixed");
  for (int i = 0; i < A.n; ++i)
    if (A.w[i] != B.w[i]) throw Error(ErrorCode::structural, std::string(what) + ": quadrature weights differ");
}
}  // namespace

BandedKernel compose(const BandedKernel& A, const BandedKernel& B) {
  check_same_space(A, B, "compose");
  const int n = A.n;
  BandedKernel C = BandedKernel::zeros(n, A.lo + B.lo, A.hi + B.hi, A.w, A.periodic);
  const int WA = A.width(), WB = B.width(), WC = C.width();
  if (WA == 0 || WB == 0) return C;
  if (A.periodic) {
    for (int i = 0; i < n; ++i)
      for (int da = A.lo; da <= A.hi; ++da) {
        int k = A.column(i, da);
        cplx a = A.data[static_cast<size_t>(i) * WA + (da - A.lo)] * A.w[k];
        if (a == cplx(0)) continue;
        const cplx* brow = B.data.data() + static_cast<size_t>(k) * WB;
        for (int db = B.lo; db <= B.hi; ++db) C.data[C.slot(i, B.column(k, db))] += a * brow[db - B.lo];
      }
    return C;
  }
  for (int i = 0; i < n; ++i) {
    cplx* crow = C.data.data() + static_cast<size_t>(i) * WC - C.lo - i;
    int k0 = std::max(0, i + A.lo), k1 = std::min(n - 1, i + A.hi);
    const cplx* arow = A.data.data() + static_cast<size_t>(i) * WA - A.lo - i;
    for (int k = k0; k <= k1; ++k) {
      cplx a = arow[k] * A.w[k];
      if (a == cplx(0)) continue;
      int j0 = std::max(0, k + B.lo), j1 = std::min(n - 1, k + B.hi);
      const cplx* brow = B.data.data() + static_cast<size_t>(k) * WB - B.lo - k;
      for (int j = j0; j <= j1; ++j) crow[j] += a * brow[j];
    }
  }
  return C;
}

BandedKernel axpby(cplx a, const BandedKernel& A, cplx b, const BandedKernel& B) {
  check_same_space(A, B, "axpby");
  BandedKernel C = BandedKernel::zeros(A.n, std::min(A.lo, B.lo), std::max(A.hi, B.hi), A.w, A.periodic);
  const int WA = A.width(), WB = B.width();
  for (int i = 0; i < A.n; ++i) {
    for (int d = A.lo; d <= A.hi; ++d) {
      int j = A.column(i, d);
      if (j >= 0) C.ref(i, j) += a * A.data[static_cast<size_t>(i) * WA + (d - A.lo)];
    }
    for (int d = B.lo; d <= B.hi; ++d) {
      int j = B.column(i, d);
      if (j >= 0) C.ref(i, j) += b * B.data[static_cast<size_t>(i) * WB + (d - B.lo)];
    }
  }
  return C;
}

double max_abs_diff(const BandedKernel& A, const BandedKernel& B) {
  if (A.n != B.n || A.periodic != B.periodic) throw Error(ErrorCode::structural, "max_abs_diff: kernel shapes differ");
  double m = 0;
  int lo = std::min(A.lo, B.lo), hi = std::max(A.hi, B.hi);
  if (A.periodic) hi = std::min(hi, lo + A.n - 1);
  for (int i = 0; i < A.n; ++i)
    for (int d = lo; d <= hi; ++d) {
      int j = A.column(i, d);
      if (j >= 0) m = std::max(m, std::abs(A.at(i, j) - B.at(i, j)));
    }
  return m;
}

NormResult operator_norm(const BandedKernel& K, const NormOptions& opt) {
  NormResult res;
  const int n = K.n;
  if (n == 0 || K.width() == 0 || K.max_abs() == 0) return res;
  if (K.lo == 0 && K.hi == 0) {  // multiplication operator
    for (int i = 0; i < n; ++i) res.value = std::max(res.value, std::abs(K.at(i, i)) * K.w[i]);
    return res;
  }
  // Work with M = W^1/2 K W^1/2 so the Euclidean norm is the L^2(w) norm.
  Vec sw(n), isw(n);
  for (int i = 0; i < n; ++i) {
    sw[i] = std::sqrt(K.w[i]);
    isw[i] = sw[i] > 0 ? 1.0 / sw[i] : 0.0;
  }
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  CVec v(n), t(n), y(n), z(n);
  auto normalize = [](CVec& a) {
    double s = 0;
    for (auto& x : a) s += std::norm(x);
    s = std::sqrt(s);
    if (s > 0)
      for (auto& x : a) x /= s;
    return s;
  };
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  normalize(v);
  double prev = -1, prev_change = -1;
  for (int it = 1; it <= opt.max_iter; ++it) {
    for (int i = 0; i < n; ++i) t[i] = v[i] * isw[i];
    K.apply(t.data(), y.data());
    for (int i = 0; i < n; ++i) y[i] *= sw[i];
    double s2 = 0;
    for (auto& x : y) s2 += std::norm(x);
    double est = std::sqrt(s2);
    for (int i = 0; i < n; ++i) t[i] = y[i] * isw[i];
    K.apply_adjoint(t.data(), z.data());
    for (int i = 0; i < n; ++i) z[i] *= sw[i];
    double zn = normalize(z);
    v.swap(z);
    res.value = est;
    res.iterations = it;
    if (zn == 0) return res;
    if (prev > 0) {
      double change = std::fabs(est - prev);
      // Geometric-rate error estimate so slow convergence is not mistaken for a fixed point.
      double rho = prev_change > 0 ? std::min(change / prev_change, 0.999) : 0.5;
      double err = rho < 1 ? change * rho / (1 - rho) : change;
      res.residual = std::max(change, err) / est;
      const double accept = std::max(opt.tol * est, opt.abs_tol);
      if (change <= accept && err <= accept && it > 3) return res;
      // Clustered top of the spectrum: if the observed rate cannot reach the tolerance within the cap,
      // small kernels switch to a dense Hermitian eigensolve of M^H M.
      if (it >= 50 && it % 50 == 0 && n <= opt.dense_fallback_max && rho > 0 && rho < 1 && err > accept) {
        double needed = std::log(accept / err) / std::log(rho);
        if (it + needed > opt.max_iter) {
          Eigen::MatrixXcd M = K.to_dense();
          for (int i = 0; i < n; ++i) M.row(i) *= sw[i];
          for (int j = 0; j < n; ++j) M.col(j) *= sw[j];
          Eigen::MatrixXcd G = M.adjoint() * M;
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
          res.value = std::sqrt(std::max(0.0, es.eigenvalues()(n - 1)));
          res.residual = 0;
          res.dense = true;
          return res;
        }
      }
      prev_change = change;
    }
    prev = est;
  }
  throw ConvergenceError("power iteration did not converge within the iteration cap", res.value, res.residual,
                         res.iterations);
}

void write_kernel_binary(const std::string& path, const Eigen::MatrixXcd& K) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  os << "sdq-kernel " << K.rows() << " " << K.cols() << " complex128-le\n";
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      double v[2] = {K(i, j).real(), K(i, j).imag()};
      for (double d : v) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        os.write(reinterpret_cast<const char*>(&bits), 8);
      }
    }
  if (!os) throw Error(ErrorCode::io, "write failed for '" + path + "'");
}

Eigen::MatrixXcd read_kernel_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  std::string magic, fmt;
  long rows = 0, cols = 0;
  hs >> magic >> rows >> cols >> fmt;
  if (magic != "sdq-kernel" || fmt != "complex128-le" || rows < 0 || cols < 0)
    throw Error(ErrorCode::io, "bad kernel header in '" + path + "'");
  Eigen::MatrixXcd K(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) {
      double v[2];
      for (double& d : v) {
        std::uint64_t bits;
        is.read(reinterpret_cast<char*>(&bits), 8);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        std::memcpy(&d, &bits, 8);
      }
      K(i, j) = cplx(v[0], v[1]);
    }
  if (!is) throw Error(ErrorCode::io, "truncated kernel file '" + path + "'");
  return K;
}

}  // namespace sdq
