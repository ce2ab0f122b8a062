// SPDX-License-Identifier: Apache-2.0
#include "sdq/observables.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace sdq {

namespace {

Vec param(const ObservableSpec& s, const std::string& key, size_t len, double dflt) {
  auto it = s.params.find(key);
  if (it == s.params.end()) return Vec(len, dflt);
  const Vec& v = it->second;
  if (v.size() == 1 && len > 1) return Vec(len, v[0]);
  if (v.size() != len) {
    std::ostringstream os;
    os << "observable parameter '" << key << "' needs " << len << " value(s), got " << v.size();
    throw Error(ErrorCode::config, os.str());
  }
  return v;
}

double scalar(const ObservableSpec& s, const std::string& key, double dflt) { return param(s, key, 1, dflt)[0]; }

void require_positive(const Vec& v, const char* what) {
  for (double x : v)
    if (!(x > 0)) throw Error(ErrorCode::config, std::string("observable parameter '") + what + "' must be positive");
}

}  // namespace

PhaseFunction gaussian_envelope(int n, int p, double amp, const Vec& q0, const Vec& sq, const Vec& e0, const Vec& se) {
  require_positive(sq, "sq");
  require_positive(se, "se");
  PhaseFunction f;
  f.n = n;
  f.p = p;
  f.real_valued = true;
  f.label = "gaussian-envelope";
  auto expo = [=](const double* u, const double* e) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += (u[i] - q0[i]) * (u[i] - q0[i]) / (2 * sq[i] * sq[i]);
    for (int i = 0; i < p; ++i) s += (e[i] - e0[i]) * (e[i] - e0[i]) / (2 * se[i] * se[i]);
    return amp * std::exp(-s);
  };
  f.f = [expo](const double* u, const double* e) { return cplx(expo(u, e)); };
  f.grad = [=](const double* u, const double* e, cplx* g) {
    double v = expo(u, e);
    for (int i = 0; i < n; ++i) g[i] = -v * (u[i] - q0[i]) / (sq[i] * sq[i]);
    for (int i = 0; i < p; ++i) g[n + i] = -v * (e[i] - e0[i]) / (se[i] * se[i]);
  };
  return f;
}

PhaseFunction base_gaussian(int n, int p, double amp, const Vec& q0, const Vec& sq) {
  require_positive(sq, "sq");
  PhaseFunction f;
  f.n = n;
  f.p = p;
  f.real_valued = true;
  f.band_limit = 0;
  f.label = "base-gaussian";
  auto val = [=](const double* u) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += (u[i] - q0[i]) * (u[i] - q0[i]) / (2 * sq[i] * sq[i]);
    return amp * std::exp(-s);
  };
  f.f = [val](const double* u, const double*) { return cplx(val(u)); };
  f.grad = [=](const double* u, const double*, cplx* g) {
    double v = val(u);
    for (int i = 0; i < n; ++i) g[i] = -v * (u[i] - q0[i]) / (sq[i] * sq[i]);
    for (int i = 0; i < p; ++i) g[n + i] = 0;
  };
  return f;
}

PhaseFunction coordinate_function(int n, int p, int index) {
  if (index < 0 || index >= n + p) throw Error(ErrorCode::structural, "coordinate index out of range");
  PhaseFunction f;
  f.n = n;
  f.p = p;
  f.real_valued = true;
  f.label = index < n ? "q" + std::to_string(index + 1) : "eps" + std::to_string(index - n + 1);
  f.f = [n, index](const double* u, const double* e) { return cplx(index < n ? u[index] : e[index - n]); };
  f.grad = [n, p, index](const double*, const double*, cplx* g) {
    for (int i = 0; i < n + p; ++i) g[i] = i == index ? 1.0 : 0.0;
  };
  return f;
}

namespace {

PhaseFunction polynomial_times_gaussian(const ObservableSpec& s, int n, int p) {
  PhaseFunction g = gaussian_envelope(n, p, scalar(s, "amp", 1.0), param(s, "q0", n, 0.0), param(s, "sq", n, 1.0),
                                      param(s, "e0", p, 0.0), param(s, "se", p, 1.0));
  int var = static_cast<int>(scalar(s, "var", static_cast<double>(n)));
  if (var < 0 || var >= n + p) throw Error(ErrorCode::config, "polynomial-times-gaussian: 'var' out of range");
  auto it = s.params.find("coeffs");
  Vec c = it == s.params.end() ? Vec{1.0} : it->second;
  if (c.empty()) throw Error(ErrorCode::config, "polynomial-times-gaussian: empty 'coeffs'");
  PhaseFunction poly;
  poly.n = n;
  poly.p = p;
  poly.real_valued = true;
  poly.label = "poly";
  auto pv = [c, n, var](const double* u, const double* e) {
    double z = var < n ? u[var] : e[var - n], acc = 0;
    for (size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
    return acc;
  };
  poly.f = [pv](const double* u, const double* e) { return cplx(pv(u, e)); };
  poly.grad = [c, n, p, var](const double* u, const double* e, cplx* g) {
    double z = var < n ? u[var] : e[var - n], acc = 0;
    for (size_t k = c.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * c[k];
    for (int i = 0; i < n + p; ++i) g[i] = 0;
    g[var] = acc;
  };
  PhaseFunction out = pf_product(poly, g);
  out.label = "polynomial-times-gaussian";
  out.real_valued = true;
  return out;
}

// Fiber profile whose grid inverse transform is a compact bump of radius R:
// B(eps) = prod_d sum_j b(xi_j) cos(eps_d xi_j) dxi.
PhaseFunction band_limited_bump(const ObservableSpec& s, int n, int p, const FiberGrid& grid) {
  double R = scalar(s, "radius", grid.L / 4);
  if (!(R > 0) || R >= grid.L) throw Error(ErrorCode::config, "band-limited-bump: radius must lie in (0, L)");
  double amp = scalar(s, "amp", 1.0);
  Vec q0 = param(s, "q0", n, 0.0), sq = param(s, "sq", n, 1.0);
  require_positive(sq, "sq");
  auto xi = std::make_shared<Vec>();
  auto bv = std::make_shared<Vec>();
  for (int j = 0; j < grid.N; ++j) {
    double x = grid.xi(j), t = x / R;
    if (std::fabs(t) < 1) {
      xi->push_back(x);
      bv->push_back(std::exp(1.0 - 1.0 / (1.0 - t * t)) * grid.dxi());
    }
  }
  auto prof = [xi, bv](double e, double* deriv) {
    double v = 0, d = 0;
    for (size_t j = 0; j < xi->size(); ++j) {
      double ph = e * (*xi)[j];
      v += (*bv)[j] * std::cos(ph);
      d -= (*bv)[j] * (*xi)[j] * std::sin(ph);
    }
    if (deriv) *deriv = d;
    return v;
  };
  auto base = [=](const double* u) {
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += (u[i] - q0[i]) * (u[i] - q0[i]) / (2 * sq[i] * sq[i]);
    return amp * std::exp(-acc);
  };
  PhaseFunction f;
  f.n = n;
  f.p = p;
  f.real_valued = true;
  f.band_limit = R;
  f.label = "band-limited-bump";
  f.f = [=](const double* u, const double* e) {
    double v = base(u);
    for (int d = 0; d < p; ++d) v *= prof(e[d], nullptr);
    return cplx(v);
  };
  f.grad = [=](const double* u, const double* e, cplx* g) {
    double b = base(u);
    std::vector<double> pv(p), pd(p);
    double prod = 1;
    for (int d = 0; d < p; ++d) {
      pv[d] = prof(e[d], &pd[d]);
      prod *= pv[d];
    }
    for (int i = 0; i < n; ++i) g[i] = -b * prod * (u[i] - q0[i]) / (sq[i] * sq[i]);
    for (int d = 0; d < p; ++d) {
      double o = b * pd[d];
      for (int k = 0; k < p; ++k)
        if (k != d) o *= pv[k];
      g[n + d] = o;
    }
  };
  return f;
}

}  // namespace

PhaseFunction make_observable(const ObservableSpec& s, int n, int p, const FiberGrid& grid) {
  if (s.family == "gaussian-envelope")
    return gaussian_envelope(n, p, scalar(s, "amp", 1.0), param(s, "q0", n, 0.0), param(s, "sq", n, 1.0),
                             param(s, "e0", p, 0.0), param(s, "se", p, 1.0));
  if (s.family == "base-gaussian")
    return base_gaussian(n, p, scalar(s, "amp", 1.0), param(s, "q0", n, 0.0), param(s, "sq", n, 1.0));
  if (s.family == "polynomial-times-gaussian") return polynomial_times_gaussian(s, n, p);
  if (s.family == "band-limited-bump") return band_limited_bump(s, n, p, grid);
  throw Error(ErrorCode::config, "unknown observable family '" + s.family + "'");
}

}  // namespace sdq
