// SPDX-License-Identifier: Apache-2.0
#include "sdq/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace sdq {

size_t FiberGrid::total() const {
  size_t t = 1;
  for (int i = 0; i < p; ++i) t *= static_cast<size_t>(N);
  return t;
}

void FiberGrid::validate() const {
  if (p < 1) throw Error(ErrorCode::structural, "fiber grid needs p >= 1");
  if (N < 4 || (N & (N - 1)) != 0) throw Error(ErrorCode::structural, "fiber grid N must be a power of two >= 4");
  if (!(L > 0)) throw Error(ErrorCode::structural, "fiber grid half width must be positive");
}

void FiberGrid::unflatten(size_t idx, int* k) const {
  for (int d = 0; d < p; ++d) {
    k[d] = static_cast<int>(idx % N);
    idx /= N;
  }
}

void FiberGrid::primal_point(size_t idx, double* xi_out) const {
  for (int d = 0; d < p; ++d) {
    xi_out[d] = xi(static_cast<int>(idx % N));
    idx /= N;
  }
}

void FiberGrid::dual_point(size_t idx, double* th_out) const {
  for (int d = 0; d < p; ++d) {
    th_out[d] = theta(static_cast<int>(idx % N));
    idx /= N;
  }
}

DensityWeight DensityWeight::constant(double c) {
  if (!(c > 0)) throw Error(ErrorCode::domain, "density weight must be positive");
  DensityWeight w;
  w.mu_e = [c](const double*) { return c; };
  return w;
}

void SampledFiberFunction::validate() const {
  grid.validate();
  if (values.size() != base_points.size())
    throw Error(ErrorCode::structural, "sampled function: one row per base point required");
  for (const auto& row : values) {
    if (row.size() != grid.total()) throw Error(ErrorCode::structural, "sampled function: row length does not match grid");
    for (const auto& v : row)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw Error(ErrorCode::structural, "sampled function has non-finite values");
  }
}

namespace {

std::mutex g_plan_mutex;

// FFTW planning is not thread-safe; execution with the new-array interface is.
fftw_plan get_plan(const std::vector<int>& dims, int sign) {
  static std::map<std::tuple<std::vector<int>, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_tuple(dims, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  size_t tot = 1;
  for (int d : dims) tot *= static_cast<size_t>(d);
  fftw_complex* a = fftw_alloc_complex(tot);
  fftw_complex* b = fftw_alloc_complex(tot);
  // FFTW wants the slowest axis first; our flat layout has axis 0 fastest.
  std::vector<int> rev(dims.rbegin(), dims.rend());
  fftw_plan pl = fftw_plan_dft(static_cast<int>(rev.size()), rev.data(), a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(a);
  fftw_free(b);
  cache.emplace(key, pl);
  return pl;
}

void raw_dft(const std::vector<int>& dims, const cplx* in, cplx* out, int sign) {
  fftw_plan pl = get_plan(dims, sign);
  fftw_execute_dft(pl, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)), reinterpret_cast<fftw_complex*>(out));
}

int parity_sum(const FiberGrid& g, size_t idx) {
  int s = 0;
  for (int d = 0; d < g.p; ++d) {
    s += static_cast<int>(idx % g.N);
    idx /= g.N;
  }
  return s & 1;
}

// Centered-grid phase alignment: both the input and output pick up (-1)^index,
// plus a global (-1)^{p N/2}.
void centered_dft(const FiberGrid& g, const cplx* in, cplx* out, double weight, int sign) {
  const size_t T = g.total();
  CVec buf(T);
  for (size_t i = 0; i < T; ++i) buf[i] = parity_sum(g, i) ? -in[i] : in[i];
  std::vector<int> dims(g.p, g.N);
  raw_dft(dims, buf.data(), out, sign);
  double glob = ((g.N / 2) * g.p) % 2 ? -weight : weight;
  for (size_t i = 0; i < T; ++i) out[i] *= parity_sum(g, i) ? -glob : glob;
}

bool boundary_index(const FiberGrid& g, size_t idx) {
  for (int d = 0; d < g.p; ++d) {
    int k = static_cast<int>(idx % g.N);
    if (k == 0 || k == g.N - 1) return true;
    idx /= g.N;
  }
  return false;
}

void check_decay(const CVec& row, const FiberGrid& g, const char* what, size_t bp, TransformReport* rep) {
  if (!rep) return;
  double peak = 0, edge = 0;
  for (size_t i = 0; i < row.size(); ++i) {
    double a = std::abs(row[i]);
    peak = std::max(peak, a);
    if (boundary_index(g, i)) edge = std::max(edge, a);
  }
  if (peak > 0 && edge > 1e-10 * peak) {
    std::ostringstream os;
    os << what << ": input at base point " << bp << " does not decay at the grid boundary (edge/peak = " << edge / peak
       << ")";
    rep->warnings.add(os.str());
  }
}

}  // namespace

void dft_nd(const std::vector<int>& dims, const cplx* in, cplx* out, int sign) {
  if (in == out) throw Error(ErrorCode::structural, "dft_nd needs distinct input and output buffers");
  raw_dft(dims, in, out, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
}

void fft_forward_row(const FiberGrid& g, const cplx* in, cplx* out, double weight) {
  centered_dft(g, in, out, weight, FFTW_FORWARD);
}

void fft_inverse_row(const FiberGrid& g, const cplx* in, cplx* out, double weight) {
  centered_dft(g, in, out, weight, FFTW_BACKWARD);
}

SampledFiberFunction fourier_forward(const SampledFiberFunction& f, const DensityWeight& mu, TransformReport* rep) {
  f.validate();
  if (f.side != FiberSide::primal) throw Error(ErrorCode::structural, "fourier_forward expects a primal-side function");
  SampledFiberFunction out;
  out.grid = f.grid;
  out.base_points = f.base_points;
  out.side = FiberSide::dual;
  out.values.resize(f.values.size());
  const double dv = std::pow(f.grid.dxi(), f.grid.p);
  for (size_t b = 0; b < f.values.size(); ++b) {
    check_decay(f.values[b], f.grid, "fourier_forward", b, rep);
    out.values[b].resize(f.grid.total());
    double m = mu(f.base_points[b].data());
    if (!(m > 0)) throw Error(ErrorCode::domain, "density weight must be positive");
    fft_forward_row(f.grid, f.values[b].data(), out.values[b].data(), dv * m);
  }
  return out;
}

SampledFiberFunction fourier_inverse(const SampledFiberFunction& g, const DensityWeight& mu, TransformReport* rep) {
  g.validate();
  if (g.side != FiberSide::dual) throw Error(ErrorCode::structural, "fourier_inverse expects a dual-side function");
  SampledFiberFunction out;
  out.grid = g.grid;
  out.base_points = g.base_points;
  out.side = FiberSide::primal;
  out.values.resize(g.values.size());
  const double dv = std::pow(g.grid.dtheta() / (2 * kPi), g.grid.p);
  for (size_t b = 0; b < g.values.size(); ++b) {
    check_decay(g.values[b], g.grid, "fourier_inverse", b, rep);
    out.values[b].resize(g.grid.total());
    double m = mu(g.base_points[b].data());
    if (!(m > 0)) throw Error(ErrorCode::domain, "density weight must be positive");
    fft_inverse_row(g.grid, g.values[b].data(), out.values[b].data(), dv / m);
  }
  return out;
}

cplx direct_forward_at(const FiberGrid& g, const cplx* row, const double* theta, double mu_e) {
  const size_t T = g.total();
  std::vector<double> xi(g.p);
  cplx acc = 0;
  for (size_t i = 0; i < T; ++i) {
    g.primal_point(i, xi.data());
    double ph = 0;
    for (int d = 0; d < g.p; ++d) ph += theta[d] * xi[d];
    acc += row[i] * cplx(std::cos(ph), -std::sin(ph));
  }
  return acc * std::pow(g.dxi(), g.p) * mu_e;
}

cplx direct_inverse_at(const FiberGrid& g, const cplx* row, const double* xi, double mu_e) {
  const size_t T = g.total();
  std::vector<double> th(g.p);
  cplx acc = 0;
  for (size_t i = 0; i < T; ++i) {
    g.dual_point(i, th.data());
    double ph = 0;
    for (int d = 0; d < g.p; ++d) ph += th[d] * xi[d];
    acc += row[i] * cplx(std::cos(ph), std::sin(ph));
  }
  return acc * std::pow(g.dtheta() / (2 * kPi), g.p) / mu_e;
}

SampledFiberFunction sample_dual(const PhaseFunction& phi, const FiberGrid& g, const std::vector<Vec>& base) {
  if (phi.p != g.p) throw Error(ErrorCode::structural, "phase function fiber dimension does not match the grid");
  SampledFiberFunction s;
  s.grid = g;
  s.base_points = base;
  s.side = FiberSide::dual;
  s.values.resize(base.size());
  std::vector<double> th(g.p);
  for (size_t b = 0; b < base.size(); ++b) {
    s.values[b].resize(g.total());
    for (size_t i = 0; i < g.total(); ++i) {
      g.dual_point(i, th.data());
      s.values[b][i] = phi(base[b].data(), th.data());
    }
  }
  return s;
}

SampledFiberFunction sample_primal(const PrimalFunction& f, const FiberGrid& g, const std::vector<Vec>& base) {
  SampledFiberFunction s;
  s.grid = g;
  s.base_points = base;
  s.side = FiberSide::primal;
  s.values.resize(base.size());
  std::vector<double> xi(g.p);
  for (size_t b = 0; b < base.size(); ++b) {
    s.values[b].resize(g.total());
    for (size_t i = 0; i < g.total(); ++i) {
      g.primal_point(i, xi.data());
      s.values[b][i] = f(base[b].data(), xi.data());
    }
  }
  return s;
}

TransformRulesReport check_transform_rules(const PrimalFunction& f, const FiberGrid& g, const std::vector<Vec>& base,
                                           const DensityWeight& mu, double tol) {
  g.validate();
  TransformRulesReport rep;
  rep.tol = tol;
  const size_t T = g.total();
  const double dv = std::pow(g.dxi(), g.p);
  const double h = 1e-3;
  // dense check in 1D; otherwise about 64 direct evaluations per axis, odd stride so every axis moves
  const size_t stride = g.p == 1 ? 1 : (T / 64) | 1;
  std::vector<double> xi(g.p), th(g.p), pt(g.p);
  const cplx I(0, 1);
  for (const auto& u : base) {
    const double m = mu(u.data());
    CVec row(T), fhat(T);
    for (size_t i = 0; i < T; ++i) {
      g.primal_point(i, xi.data());
      row[i] = f(u.data(), xi.data());
    }
    fft_forward_row(g, row.data(), fhat.data(), dv * m);
    for (int axis = 0; axis < g.p; ++axis) {
      // d/dtheta of the transform against the transform of -i xi f
      CVec xf(T), rhs(T);
      for (size_t i = 0; i < T; ++i) {
        g.primal_point(i, xi.data());
        xf[i] = xi[axis] * row[i];
      }
      fft_forward_row(g, xf.data(), rhs.data(), dv * m);
      for (size_t i = 0; i < T; i += stride) {
        g.dual_point(i, th.data());
        auto at = [&](double s) {
          pt = th;
          pt[axis] += s;
          return direct_forward_at(g, row.data(), pt.data(), m);
        };
        cplx d = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12 * h);
        rep.dual_derivative_residual = std::max(rep.dual_derivative_residual, std::abs(d - (-I) * rhs[i]));
      }
      // transform of df/dxi against i theta fhat
      CVec df(T), dhat(T);
      for (size_t i = 0; i < T; ++i) {
        g.primal_point(i, xi.data());
        auto at = [&](double s) {
          pt = xi;
          pt[axis] += s;
          return f(u.data(), pt.data());
        };
        df[i] = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12 * h);
      }
      fft_forward_row(g, df.data(), dhat.data(), dv * m);
      for (size_t i = 0; i < T; ++i) {
        g.dual_point(i, th.data());
        rep.primal_derivative_residual = std::max(rep.primal_derivative_residual, std::abs(I * th[axis] * fhat[i] - dhat[i]));
      }
    }
  }
  rep.pass = rep.dual_derivative_residual <= tol && rep.primal_derivative_residual <= tol;
  return rep;
}

double smooth_step_down(double r, double r0, double r1) {
  if (r <= r0) return 1.0;
  if (r >= r1) return 0.0;
  double t = (r - r0) / (r1 - r0);
  auto psi = [](double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; };
  double a = psi(1 - t), b = psi(t);
  return a / (a + b);
}

SampledFiberFunction project_paley_wiener(const PhaseFunction& phi, const FiberGrid& g, const std::vector<Vec>& base,
                                          double R, const DensityWeight& mu) {
  g.validate();
  if (!(R > 0) || R >= g.L / 2) {
    std::ostringstream os;
    os << "band limit R = " << R << " must satisfy 0 < R < L/2 = " << g.L / 2;
    throw Error(ErrorCode::aliasing, os.str());
  }
  SampledFiberFunction s = sample_dual(phi, g, base);
  SampledFiberFunction x = fourier_inverse(s, mu);
  std::vector<double> xi(g.p);
  for (auto& row : x.values)
    for (size_t i = 0; i < row.size(); ++i) {
      g.primal_point(i, xi.data());
      double r = 0;
      for (double v : xi) r += v * v;
      row[i] *= smooth_step_down(std::sqrt(r), R, 2 * R);
    }
  return fourier_forward(x, mu);
}

SampledFiberFunction fiber_convolve(const SampledFiberFunction& f, const SampledFiberFunction& g,
                                    const DensityWeight& mu) {
  f.validate();
  g.validate();
  if (f.side != FiberSide::primal || g.side != FiberSide::primal)
    throw Error(ErrorCode::structural, "fiber_convolve expects primal-side functions");
  if (f.grid.N != g.grid.N || f.grid.p != g.grid.p || f.grid.L != g.grid.L || f.base_points.size() != g.base_points.size())
    throw Error(ErrorCode::structural, "fiber_convolve: grids do not match");
  const FiberGrid& G = f.grid;
  const int N = G.N, N2 = 2 * N;
  std::vector<int> dims(G.p, N2);
  size_t T2 = 1;
  for (int d = 0; d < G.p; ++d) T2 *= static_cast<size_t>(N2);
  SampledFiberFunction out = f;
  std::vector<int> k(G.p);
  for (size_t b = 0; b < f.values.size(); ++b) {
    CVec a(T2, 0.0), c(T2, 0.0), A(T2), C(T2);
    for (size_t i = 0; i < G.total(); ++i) {
      G.unflatten(i, k.data());
      size_t j = 0, mul = 1;
      for (int d = 0; d < G.p; ++d) {
        j += k[d] * mul;
        mul *= N2;
      }
      a[j] = f.values[b][i];
      c[j] = g.values[b][i];
    }
    raw_dft(dims, a.data(), A.data(), FFTW_FORWARD);
    raw_dft(dims, c.data(), C.data(), FFTW_FORWARD);
    for (size_t i = 0; i < T2; ++i) A[i] *= C[i];
    raw_dft(dims, A.data(), a.data(), FFTW_BACKWARD);
    double scale = std::pow(G.dxi(), G.p) * mu(f.base_points[b].data()) / static_cast<double>(T2);
    for (size_t i = 0; i < G.total(); ++i) {
      G.unflatten(i, k.data());
      size_t j = 0, mul = 1;
      for (int d = 0; d < G.p; ++d) {
        j += (k[d] + N / 2) * mul;
        mul *= N2;
      }
      out.values[b][i] = a[j] * scale;
    }
  }
  return out;
}

}  // namespace sdq
