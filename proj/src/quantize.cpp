// SPDX-License-Identifier: Apache-2.0
#include "sdq/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdq {

void CutoffKappa::validate() const {
  if (!(r_inner > 0) || !(r_outer > r_inner))
    throw Error(ErrorCode::config, "kappa cutoff needs 0 < r_inner < r_outer");
}

void HbarCutoffChi::validate() const {
  if (!(plateau > 0) || !(max > plateau)) throw Error(ErrorCode::config, "chi cutoff needs 0 < plateau < max");
}

HbarCutoffChi HbarCutoffChi::from_hbar_list(const Vec& hbars) {
  double h = 0;
  for (double x : hbars) h = std::max(h, std::fabs(x));
  if (h <= 0) h = 1.0;
  return HbarCutoffChi{h, 2 * h};
}

QuantizationScenario QuantizationScenario::make(std::string name, GroupoidModel model, SignConvention sign,
                                                FiberGrid grid, Vec hbar_list) {
  QuantizationScenario sc;
  sc.name = std::move(name);
  sc.sign = sign;
  switch (model.kind) {
    case ModelKind::finite_pair:
      sc.sf = sf_abelian(0, 1, Box{});
      sc.sf.name = "none";
      grid.p = 1;
      break;
    case ModelKind::grid_pair:
      sc.sf = sf_tangent(1, Box{{model.base_lo}, {model.base_hi}});
      grid.p = 1;
      break;
    case ModelKind::exp_nilpotent_group:
      if (model.is_abelian()) {
        sc.sf = sf_abelian(0, model.dim, Box{});
      } else if (model.dim == 3) {
        sc.sf = sf_heisenberg();
      } else {
        throw Error(ErrorCode::unsupported, "non-abelian groups other than the Heisenberg group are not available");
      }
      grid.p = model.dim;
      break;
    case ModelKind::transformation:
      sc.sf = sf_action_rotation(Box{{model.base_lo, model.base_lo}, {model.base_hi, model.base_hi}});
      grid.p = 1;
      break;
  }
  sc.model = std::move(model);
  sc.grid = grid;
  sc.kappa = CutoffKappa::defaults(grid);
  sc.hbar_list = std::move(hbar_list);
  sc.chi = HbarCutoffChi::from_hbar_list(sc.hbar_list);
  return sc;
}

int QuantizationScenario::orientation() const {
  int o = model.kind == ModelKind::grid_pair ? -1 : 1;
  return sign == SignConvention::weyl ? -o : o;
}

double QuantizationScenario::bch_consistency() const {
  if (model.kind == ModelKind::finite_pair) return 0.0;
  LocalParametrization par = parametrization_for(model);
  double worst = 0;
  for (const auto& u : sf.chart.samples) {
    BchResult r = bch_extract(par, u, 1e-4);
    Vec a = sf.a_at(u.data());
    Tensor3 c = sf.c_at(u.data());
    for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - r.a[i]));
    for (size_t i = 0; i < c.v.size(); ++i) worst = std::max(worst, std::fabs(c.v[i] - r.c.v[i]));
  }
  return worst;
}

void QuantizationScenario::validate() const {
  grid.validate();
  kappa.validate();
  chi.validate();
  model.validate();
  if (hbar_list.empty()) throw Error(ErrorCode::config, "hbar_list must not be empty");
  for (size_t i = 0; i < hbar_list.size(); ++i) {
    if (!(hbar_list[i] > 0)) throw Error(ErrorCode::config, "hbar_list entries must be positive");
    if (i > 0 && !(hbar_list[i] < hbar_list[i - 1])) throw Error(ErrorCode::config, "hbar_list must be strictly decreasing");
  }
  if (!(trim_rel >= 0 && trim_rel < 1e-6)) throw Error(ErrorCode::config, "trim threshold must lie in [0, 1e-6)");
  if (model.kind == ModelKind::finite_pair) return;
  if (sf.n() != model.base_dim() || sf.p() != model.fiber_dim())
    throw Error(ErrorCode::structural, "structure functions do not match the model dimensions");
  if (grid.p != model.fiber_dim()) throw Error(ErrorCode::structural, "fiber grid dimension does not match the model");
  for (const auto& u : sf.chart.samples)
    if (std::fabs(mu(u.data()) - 1.0) > 1e-15)
      throw Error(ErrorCode::unsupported, "quantized models use the Lebesgue density (mu_e = 1)");
  double dev = bch_consistency();
  if (dev > 1e-4) {
    std::ostringstream os;
    os << "structure functions disagree with the model parametrization by " << dev;
    throw Error(ErrorCode::structural, os.str());
  }
}

BandedKernel weyl_line_kernel(const FiberGrid& g, int i0, int n, double hbar, int orient, const CutoffKappa& kappa,
                              const LineSymbol& symbol, const Vec* weights) {
  if (n < 1) throw Error(ErrorCode::domain, "line kernel needs at least one point");
  FiberGrid g1 = g;
  g1.p = 1;
  const int N = g1.N, half = N / 2 - 1;
  const double dx = hbar * g1.dxi();
  Vec w = weights ? *weights : Vec(n, dx);
  BandedKernel K = BandedKernel::zeros(n, -half, half, std::move(w));
  const double scale = 1.0 / hbar;
  Vec kap(2 * half + 1);
  for (int d = -half; d <= half; ++d) kap[d + half] = kappa(hbar * d * g1.dxi()) * scale;
  CVec row(N), out(N);
  const double wt = g1.dtheta() / (2 * kPi);
  for (int t = 0; t <= 2 * n - 2; ++t) {
    double m = (2.0 * i0 + t) * 0.5 * dx;
    symbol(m, row.data());
    fft_inverse_row(g1, row.data(), out.data(), wt);
    int dlo = std::max(-half, t - 2 * (n - 1)), dhi = std::min(half, t);
    dlo = std::max(dlo, -t);
    dhi = std::min(dhi, 2 * (n - 1) - t);
    for (int d = dlo; d <= dhi; ++d) {
      if ((t + d) & 1) continue;
      int i = (t + d) / 2, j = (t - d) / 2;
      K.ref(i, j) = kap[d + half] * out[N / 2 + orient * d];
    }
  }
  return K;
}

namespace {

FiberGrid line_grid(const FiberGrid& g) {
  FiberGrid g1 = g;
  g1.p = 1;
  return g1;
}

// Fiber dual points of the line grid.
Vec dual_line(const FiberGrid& g) {
  Vec th(g.N);
  for (int k = 0; k < g.N; ++k) th[k] = g.theta(k);
  return th;
}

void warn_edges(const BandedKernel& K, Warnings* warn) {
  if (!warn || K.n < 2) return;
  double peak = K.max_abs(), edge = 0;
  for (int d = K.lo; d <= K.hi; ++d) {
    edge = std::max(edge, std::abs(K.at(0, d)));
    edge = std::max(edge, std::abs(K.at(K.n - 1, K.n - 1 - d)));
  }
  if (peak > 0 && edge > 1e-10 * peak) {
    std::ostringstream os;
    os << "kernel truncated at the base box: escaped mass about " << edge / peak << " of the peak";
    warn->add(os.str());
  }
}

AlgebraElement quantize_grid_pair(const QuantizationScenario& sc, const PhaseFunction& f, double hbar,
                                  Warnings* warn) {
  const FiberGrid g = line_grid(sc.grid);
  const double dx = hbar * g.dxi();
  int i0 = static_cast<int>(std::ceil(sc.model.base_lo / dx - 1e-9));
  int i1 = static_cast<int>(std::floor(sc.model.base_hi / dx + 1e-9));
  const Vec th = dual_line(g);
  LineSymbol sym = [&](double m, cplx* row) {
    for (int k = 0; k < g.N; ++k) row[k] = f(&m, &th[k]);
  };
  BandedKernel K = weyl_line_kernel(g, i0, i1 - i0 + 1, hbar, sc.orientation(), sc.kappa, sym);
  warn_edges(K, warn);
  K.trim(sc.trim_rel);
  return make_kernel_element(ModelKind::grid_pair, std::move(K), hbar);
}

// Slice grid of the Heisenberg model: central parameters on the dual grid with |lambda| >= lambda_min.
Vec heisenberg_lambdas(const QuantizationScenario& sc) {
  Vec out;
  for (int k = 0; k < sc.grid.N; ++k) {
    double l = sc.grid.theta(k);
    if (std::fabs(l) >= sc.model.lambda_min - 1e-12) out.push_back(l);
  }
  return out;
}

AlgebraElement quantize_heisenberg(const QuantizationScenario& sc, const PhaseFunction& f, double hbar) {
  const FiberGrid g = line_grid(sc.grid);
  const int N = g.N;
  const Vec th = dual_line(g);
  const Vec lambdas = heisenberg_lambdas(sc);
  // Own-symbol magnitude per slice on the dual grid; negligible slices keep an empty band.
  Vec smax(lambdas.size(), 0.0);
  double gmax = 0;
  for (size_t s = 0; s < lambdas.size(); ++s) {
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        double e[3] = {th[a], th[b], lambdas[s]};
        smax[s] = std::max(smax[s], std::abs(f(nullptr, e)));
      }
    gmax = std::max(gmax, smax[s]);
  }
  AlgebraElement el;
  el.model = ModelKind::exp_nilpotent_group;
  el.rep = RepKind::slices;
  el.hbar = hbar;
  el.c = sc.model.c;
  const double dt = hbar * g.dxi();
  for (size_t s = 0; s < lambdas.size(); ++s) {
    const double lam = lambdas[s];
    int M = static_cast<int>(std::floor(sc.model.theta2_extent / std::fabs(lam) / dt));
    Slice sl;
    sl.label = Vec{lam};
    if (smax[s] <= 1e-14 * gmax || gmax == 0) {
      sl.K = BandedKernel::zeros(2 * M + 1, 0, -1, Vec(2 * M + 1, dt));
    } else {
      LineSymbol sym = [&](double m, cplx* row) {
        for (int k = 0; k < N; ++k) {
          double e[3] = {th[k], -lam * m, lam};
          row[k] = f(nullptr, e);
        }
      };
      sl.K = weyl_line_kernel(g, -M, 2 * M + 1, hbar, sc.orientation(), sc.kappa, sym);
      sl.K.trim(sc.trim_rel);
    }
    el.slices.push_back(std::move(sl));
  }
  // One-dimensional representations: multiplication by f(theta1, theta2, 0).
  Slice ch;
  ch.label = Vec{0.0};
  ch.K = BandedKernel::zeros(N * N, 0, 0, Vec(static_cast<size_t>(N) * N, 1.0));
  for (int b = 0; b < N; ++b)
    for (int a = 0; a < N; ++a) {
      double e[3] = {th[a], th[b], 0.0};
      ch.K.data[static_cast<size_t>(b) * N + a] = f(nullptr, e);
    }
  el.slices.push_back(std::move(ch));
  return el;
}

AlgebraElement quantize_rotation(const QuantizationScenario& sc, const PhaseFunction& f, double hbar) {
  const FiberGrid g = line_grid(sc.grid);
  const int N = g.N;
  const Vec th = dual_line(g);
  const int o = sc.orientation();
  int Nphi = static_cast<int>(std::ceil(2 * kPi / (hbar * g.dxi()) - 1e-9));
  if (Nphi % 2) ++Nphi;
  const double delta = 2 * kPi / Nphi;
  int Dmax = static_cast<int>(std::floor(g.L * hbar / delta));
  if (Dmax * delta / hbar >= g.L) --Dmax;
  const double wt = g.dtheta() / (2 * kPi);
  // phase table e^{i theta_k eta_D}, eta_D = o D delta / hbar
  std::vector<CVec> ph(2 * Dmax + 1, CVec(N));
  for (int D = 0; D <= Dmax; ++D)
    for (int k = 0; k < N; ++k) {
      double a = th[k] * o * D * delta / hbar;
      ph[Dmax + D][k] = cplx(std::cos(a), std::sin(a));
      ph[Dmax - D][k] = std::conj(ph[Dmax + D][k]);
    }
  AlgebraElement el;
  el.model = ModelKind::transformation;
  el.rep = RepKind::slices;
  el.hbar = hbar;
  el.c = sc.model.c;
  std::vector<CVec> fs(2 * Nphi, CVec(N));
  for (double r : sc.model.radii) {
    const Vec u{r, 0.0};
    for (int s = 0; s < 2 * Nphi; ++s) {
      Vec pt = sc.model.act(s * delta / 2, u);
      for (int k = 0; k < N; ++k) fs[s][k] = f(pt.data(), &th[k]);
    }
    // F^{-1} sigma at every (midpoint, offset) pair that occurs
    std::vector<cplx> finv(static_cast<size_t>(2 * Nphi) * (2 * Dmax + 1));
    for (int s = 0; s < 2 * Nphi; ++s)
      for (int D = -Dmax; D <= Dmax; ++D) {
        if (((s - D) % 2 + 2) % 2) continue;  // s = 2i - D mod 2 Nphi
        cplx acc = 0;
        const cplx* a = fs[s].data();
        const cplx* b = ph[Dmax + D].data();
        for (int k = 0; k < N; ++k) acc += a[k] * b[k];
        finv[static_cast<size_t>(s) * (2 * Dmax + 1) + (D + Dmax)] = acc * wt * sc.kappa(D * delta) / hbar;
      }
    for (double kb : sc.model.bloch_phases) {
      Slice sl;
      sl.label = Vec{r, kb};
      sl.K = BandedKernel::zeros(Nphi, -Dmax, Dmax, Vec(Nphi, delta), true);
      for (int i = 0; i < Nphi; ++i)
        for (int D = -Dmax; D <= Dmax; ++D) {
          int jr = i - D;
          int nw = static_cast<int>(std::floor(static_cast<double>(jr) / Nphi));
          int j = jr - nw * Nphi;
          int s = ((2 * i - D) % (2 * Nphi) + 2 * Nphi) % (2 * Nphi);
          cplx v = finv[static_cast<size_t>(s) * (2 * Dmax + 1) + (D + Dmax)];
          double a = 2 * kPi * kb * nw;
          sl.K.ref(i, j) += v * cplx(std::cos(a), std::sin(a));
        }
      el.slices.push_back(std::move(sl));
    }
  }
  return el;
}

AlgebraElement quantize_abelian(const QuantizationScenario& sc, const PhaseFunction& f, double hbar) {
  const FiberGrid& g = sc.grid;
  const int p = g.p, N = g.N;
  const size_t T = g.total();
  CVec row(T), out(T);
  std::vector<double> e(p);
  for (size_t i = 0; i < T; ++i) {
    g.dual_point(i, e.data());
    row[i] = f(nullptr, e.data());
  }
  fft_inverse_row(g, row.data(), out.data(), std::pow(g.dtheta() / (2 * kPi), p));
  AlgebraElement el;
  el.model = ModelKind::exp_nilpotent_group;
  el.rep = RepKind::group_samples;
  el.hbar = hbar;
  el.c = sc.model.c;
  el.samples = GroupSamples::zeros(std::vector<int>(p, N - 1), Vec(p, hbar * g.dxi()));
  const double scale = std::pow(hbar, -p);
  const int o = sc.orientation();
  std::vector<int> k(p);
  for (size_t i = 0; i < el.samples.size(); ++i) {
    size_t r = i, src = 0, mul = 1;
    double rad2 = 0;
    for (int d = 0; d < p; ++d) {
      int kk = static_cast<int>(r % (N - 1)) + 1;  // grid index 1..N-1
      r /= (N - 1);
      int ks = o > 0 ? kk : N - kk;
      src += static_cast<size_t>(ks) * mul;
      mul *= N;
      double x = (kk - N / 2) * g.dxi() * hbar;
      rad2 += x * x;
    }
    el.samples.values[i] = scale * sc.kappa(std::sqrt(rad2)) * out[src];
  }
  return el;
}

AlgebraElement quantize_zero(const QuantizationScenario& sc, const PhaseFunction& f) {
  const std::vector<Vec> base = sup_base_points(sc);
  const size_t T = sc.grid.total();
  const size_t n = base.size() * T;
  BandedKernel K = BandedKernel::zeros(static_cast<int>(n), 0, 0, Vec(n, 1.0));
  std::vector<double> e(sc.grid.p);
  for (size_t b = 0; b < base.size(); ++b)
    for (size_t i = 0; i < T; ++i) {
      sc.grid.dual_point(i, e.data());
      K.data[b * T + i] = f(base[b].data(), e.data());
    }
  return make_kernel_element(sc.model.kind, std::move(K), 0.0);
}

}  // namespace

std::vector<Vec> sup_base_points(const QuantizationScenario& sc) {
  std::vector<Vec> pts;
  switch (sc.model.kind) {
    case ModelKind::grid_pair: {
      const double h = 1.0 / 16;
      int a = static_cast<int>(std::ceil(sc.model.base_lo / h)), b = static_cast<int>(std::floor(sc.model.base_hi / h));
      for (int i = a; i <= b; ++i) pts.push_back(Vec{i * h});
      break;
    }
    case ModelKind::transformation: {
      const double h = 1.0 / 8;
      int a = static_cast<int>(std::ceil(sc.model.base_lo / h)), b = static_cast<int>(std::floor(sc.model.base_hi / h));
      for (int j = a; j <= b; ++j)
        for (int i = a; i <= b; ++i) pts.push_back(Vec{i * h, j * h});
      break;
    }
    default: pts.push_back(Vec{}); break;
  }
  return pts;
}

double sup_norm(const QuantizationScenario& sc, const PhaseFunction& f) {
  const std::vector<Vec> base = sup_base_points(sc);
  const size_t T = sc.grid.total();
  std::vector<double> e(sc.grid.p);
  double m = 0;
  for (const auto& u : base)
    for (size_t i = 0; i < T; ++i) {
      sc.grid.dual_point(i, e.data());
      m = std::max(m, std::abs(f(u.data(), e.data())));
    }
  return m;
}

AlgebraElement weyl_quantize(const QuantizationScenario& sc, const PhaseFunction& f, double hbar, Warnings* warn) {
  if (!std::isfinite(hbar) || hbar < 0) throw Error(ErrorCode::domain, "hbar must be finite and non-negative");
  if (f.n != sc.model.base_dim() || f.p != sc.model.fiber_dim())
    throw Error(ErrorCode::structural, "observable dimensions do not match the model");
  if (hbar == 0) return quantize_zero(sc, f);
  switch (sc.model.kind) {
    case ModelKind::finite_pair:
      throw Error(ErrorCode::unsupported, "the finite pair groupoid carries no quantization map");
    case ModelKind::grid_pair: return quantize_grid_pair(sc, f, hbar, warn);
    case ModelKind::exp_nilpotent_group:
      return sc.model.is_abelian() ? quantize_abelian(sc, f, hbar) : quantize_heisenberg(sc, f, hbar);
    case ModelKind::transformation: return quantize_rotation(sc, f, hbar);
  }
  return {};
}

PhaseFunction deformed_involution(const PhaseFunction& f) { return pf_conj(f); }

double seminorm(const QuantizationScenario& sc, const PhaseFunction& f, double hbar, const NormOptions& opt) {
  if (hbar == 0) return sup_norm(sc, f);
  double c = sc.chi(hbar);
  if (c == 0) return 0.0;
  return c * reduced_norm(weyl_quantize(sc, f, hbar), opt).value;
}

}  // namespace sdq
