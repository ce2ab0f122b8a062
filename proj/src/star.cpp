// SPDX-License-Identifier: Apache-2.0
// Deformed product and commutator pullbacks, evaluated on local line windows.
#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdq/quantize.hpp"

namespace sdq {

namespace {

void require_line_model(const QuantizationScenario& sc, const char* what) {
  const ModelKind k = sc.model.kind;
  if (k == ModelKind::grid_pair || k == ModelKind::transformation) return;
  if (k == ModelKind::exp_nilpotent_group && !sc.model.is_abelian() && sc.model.dim == 3) return;
  throw Error(ErrorCode::unsupported, std::string(what) + " is available on grid-pair, Heisenberg and rotation models");
}

// (u, e) of the observable at line coordinate m through chart point cp, fiber value theta.
struct ChartEval {
  const QuantizationScenario& sc;
  const ChartPoint& cp;
  Vec u, e;
  ChartEval(const QuantizationScenario& s, const ChartPoint& c) : sc(s), cp(c) {
    u.resize(sc.model.base_dim());
    e.resize(sc.model.fiber_dim());
  }
  cplx operator()(const PhaseFunction& f, double m, double theta) {
    switch (sc.model.kind) {
      case ModelKind::grid_pair:
        u[0] = cp.base[0] + m;
        e[0] = theta;
        break;
      case ModelKind::transformation: {
        Vec pt = sc.model.act(m, cp.base);
        u[0] = pt[0];
        u[1] = pt[1];
        e[0] = theta;
        break;
      }
      default: {
        const double lam = cp.base[0];
        e[0] = theta;
        e[1] = -lam * (cp.base[1] + m);
        e[2] = lam;
        break;
      }
    }
    return f(u.data(), e.data());
  }
};

BandedKernel window_kernel(const QuantizationScenario& sc, const PhaseFunction& f, const ChartPoint& cp, double hbar,
                           int W) {
  FiberGrid g = sc.grid;
  g.p = 1;
  Vec th(g.N);
  for (int k = 0; k < g.N; ++k) th[k] = g.theta(k);
  ChartEval ev(sc, cp);
  LineSymbol sym = [&](double m, cplx* row) {
    for (int k = 0; k < g.N; ++k) row[k] = ev(f, m, th[k]);
  };
  return weyl_line_kernel(g, -W, 2 * W + 1, hbar, sc.orientation(), sc.kappa, sym);
}

// Pullback of a window kernel at its centre: F^{-1}h(0, eta) at eta = o d dxi, d even.
// Returns values indexed by j with d = 2 j o, j in [-J, J].
CVec center_pullback(const BandedKernel& K, int W, double hbar, int o, int J) {
  CVec v(2 * J + 1);
  for (int j = -J; j <= J; ++j) {
    int d = 2 * j * o;
    v[j + J] = hbar * K.at(W + d / 2, W - d / 2);
  }
  return v;
}

void check_escape(const CVec& v, int J, int Jin, const char* what) {
  double peak = 0, out = 0;
  for (int j = -J; j <= J; ++j) {
    double a = std::abs(v[j + J]);
    peak = std::max(peak, a);
    if (std::abs(j) > Jin) out = std::max(out, a);
  }
  if (peak > 0 && out > 1e-6 * peak) {
    std::ostringstream os;
    os << what << ": composed support leaves the Weyl neighbourhood (relative mass " << out / peak
       << " beyond |eta| = L)";
    throw Error(ErrorCode::support_escape, os.str());
  }
}

}  // namespace

std::vector<ChartPoint> default_chart_points(const QuantizationScenario& sc, int count) {
  std::vector<ChartPoint> pts;
  if (count < 1) return pts;
  auto lin = [count](double a, double b, int i) { return count == 1 ? 0.5 * (a + b) : a + (b - a) * i / (count - 1); };
  switch (sc.model.kind) {
    case ModelKind::grid_pair:
      for (int i = 0; i < count; ++i) pts.push_back(ChartPoint{Vec{lin(-2.0, 2.0, i)}});
      break;
    case ModelKind::transformation:
      for (double r : sc.model.radii)
        for (int i = 0; i < count; ++i) {
          double a = 2 * kPi * i / count;
          pts.push_back(ChartPoint{Vec{r * std::cos(a), r * std::sin(a)}});
        }
      break;
    case ModelKind::exp_nilpotent_group:
      for (int i = 0; i < count; ++i)
        for (int j = 0; j < count; ++j) pts.push_back(ChartPoint{Vec{lin(3.0, 5.0, i), lin(-0.6, 0.6, j)}});
      break;
    default: break;
  }
  return pts;
}

SymbolSamples star_product(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g,
                           double hbar, const std::vector<ChartPoint>& points) {
  require_line_model(sc, "star_product");
  if (!(hbar > 0)) throw Error(ErrorCode::domain, "star_product needs hbar > 0");
  const int N = sc.grid.N, W = N, o = sc.orientation(), J = N / 2 - 1;
  const double dxi = sc.grid.dxi(), chi = sc.chi(hbar);
  SymbolSamples out;
  out.hbar = hbar;
  out.points = points;
  out.side = FiberSide::dual;
  const double tmax = kPi / (2 * dxi);
  for (int k = 0; k < N; ++k)
    if (std::fabs(sc.grid.theta(k)) < tmax - 1e-12) out.fiber.push_back(sc.grid.theta(k));
  out.values.reserve(points.size() * out.fiber.size());
  for (const auto& cp : points) {
    BandedKernel C = compose(window_kernel(sc, f, cp, hbar, W), window_kernel(sc, g, cp, hbar, W));
    CVec v = center_pullback(C, W, hbar, o, J);
    check_escape(v, J, N / 4 - 1, "star_product");
    for (double th : out.fiber) {
      cplx acc = 0;
      for (int j = -J; j <= J; ++j) {
        double eta = 2.0 * j * dxi;
        acc += v[j + J] * cplx(std::cos(th * eta), -std::sin(th * eta));
      }
      out.values.push_back(chi * chi * acc * (2 * dxi));
    }
  }
  return out;
}

SymbolSamples commutator_pullback(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g,
                                  double hbar, const std::vector<ChartPoint>& points) {
  require_line_model(sc, "commutator_pullback");
  if (!(hbar > 0)) throw Error(ErrorCode::domain, "commutator_pullback needs hbar > 0");
  const int N = sc.grid.N, W = N, o = sc.orientation(), J = N / 2 - 1, Jin = N / 4 - 1;
  const double dxi = sc.grid.dxi();
  SymbolSamples out;
  out.hbar = hbar;
  out.points = points;
  out.side = FiberSide::primal;
  for (int j = -Jin; j <= Jin; ++j) out.fiber.push_back(2.0 * j * dxi);
  for (const auto& cp : points) {
    BandedKernel Kf = window_kernel(sc, f, cp, hbar, W), Kg = window_kernel(sc, g, cp, hbar, W);
    BandedKernel C = axpby(1.0, compose(Kf, Kg), -1.0, compose(Kg, Kf));
    CVec v = center_pullback(C, W, hbar, o, J);
    check_escape(v, J, Jin, "commutator_pullback");
    for (int j = -Jin; j <= Jin; ++j) out.values.push_back(v[j + J] / hbar);
  }
  return out;
}

SymbolSamples sample_symbol(const QuantizationScenario& sc, const PhaseFunction& f, const SymbolSamples& layout) {
  SymbolSamples out = layout;
  out.values.clear();
  FiberGrid g = sc.grid;
  g.p = 1;
  for (const auto& cp : layout.points) {
    ChartEval ev(sc, cp);
    if (layout.side == FiberSide::dual) {
      for (double th : layout.fiber) out.values.push_back(ev(f, 0.0, th));
    } else {
      CVec row(g.N);
      for (int k = 0; k < g.N; ++k) row[k] = ev(f, 0.0, g.theta(k));
      for (double eta : layout.fiber) out.values.push_back(direct_inverse_at(g, row.data(), &eta, 1.0));
    }
  }
  return out;
}

}  // namespace sdq
