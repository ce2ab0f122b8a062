// SPDX-License-Identifier: Apache-2.0
#include "sdq/algebroid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdq {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::structural: return "structural";
    case ErrorCode::aliasing: return "aliasing";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::evaluation: return "evaluation";
    case ErrorCode::config: return "config";
    case ErrorCode::out_of_neighbourhood: return "out-of-neighbourhood";
    case ErrorCode::support_escape: return "support-escape";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

const char* sign_name(SignConvention s) { return s == SignConvention::standard ? "standard" : "weyl"; }

bool Box::contains(const double* u, double slack) const {
  for (int i = 0; i < dim(); ++i) {
    if (u[i] < lo[i] - slack || u[i] > hi[i] + slack) return false;
  }
  return true;
}

void ChartDomain::validate() const {
  if (n < 0) throw Error(ErrorCode::structural, "base dimension must be >= 0");
  if (p < 1) throw Error(ErrorCode::structural, "fiber dimension must be >= 1");
  if (box.dim() != n || static_cast<int>(box.hi.size()) != n)
    throw Error(ErrorCode::structural, "base box dimension does not match n");
  for (int i = 0; i < n; ++i)
    if (!(box.lo[i] < box.hi[i])) throw Error(ErrorCode::structural, "base box must have lo < hi");
  for (const auto& s : samples) {
    if (static_cast<int>(s.size()) != n) throw Error(ErrorCode::structural, "sample point has wrong dimension");
    if (n > 0 && !box.contains(s.data())) throw Error(ErrorCode::domain, "sample point outside base box");
  }
}

ChartDomain ChartDomain::uniform(int n, int p, Vec lo, Vec hi, int per_axis) {
  ChartDomain d;
  d.n = n;
  d.p = p;
  d.box = Box{std::move(lo), std::move(hi)};
  if (n == 0) {
    d.samples.push_back(Vec{});
    return d;
  }
  per_axis = std::max(per_axis, 1);
  size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<size_t>(per_axis);
  for (size_t idx = 0; idx < total; ++idx) {
    Vec u(n);
    size_t r = idx;
    for (int i = 0; i < n; ++i) {
      int k = static_cast<int>(r % per_axis);
      r /= per_axis;
      double t = per_axis == 1 ? 0.5 : static_cast<double>(k) / (per_axis - 1);
      u[i] = d.box.lo[i] + t * (d.box.hi[i] - d.box.lo[i]);
    }
    d.samples.push_back(std::move(u));
  }
  return d;
}

void StructureFunctions::check_domain(const double* u) const {
  if (chart.n > 0 && !chart.box.contains(u)) {
    std::ostringstream os;
    os << "evaluation outside base box for algebroid '" << name << "'";
    throw Error(ErrorCode::domain, os.str());
  }
}

Vec StructureFunctions::a_at(const double* u) const {
  check_domain(u);
  if (!a) return Vec(static_cast<size_t>(p()) * n(), 0.0);
  return a(u);
}

Tensor3 StructureFunctions::c_at(const double* u) const {
  check_domain(u);
  if (!c) return Tensor3(p());
  return c(u);
}

namespace {
double fd_step(double x, double h) { return h * std::max(1.0, std::fabs(x)); }
}  // namespace

std::vector<Vec> StructureFunctions::da_at(const double* u) const {
  check_domain(u);
  const int nn = n();
  if (mode == DerivativeMode::analytic && da) return da(u);
  std::vector<Vec> out(nn);
  Vec w(u, u + nn);
  for (int l = 0; l < nn; ++l) {
    double h = fd_step(w[l], h_fd);
    double x0 = w[l];
    w[l] = x0 + h;
    Vec ap = a(w.data());
    w[l] = x0 - h;
    Vec am = a(w.data());
    w[l] = x0;
    Vec d(ap.size());
    for (size_t t = 0; t < d.size(); ++t) d[t] = (ap[t] - am[t]) / (2 * h);
    out[l] = std::move(d);
  }
  return out;
}

std::vector<Tensor3> StructureFunctions::dc_at(const double* u) const {
  check_domain(u);
  const int nn = n();
  if (mode == DerivativeMode::analytic && dc) return dc(u);
  std::vector<Tensor3> out(nn, Tensor3(p()));
  if (!c) return out;
  Vec w(u, u + nn);
  for (int l = 0; l < nn; ++l) {
    double h = fd_step(w[l], h_fd);
    double x0 = w[l];
    w[l] = x0 + h;
    Tensor3 cp = c(w.data());
    w[l] = x0 - h;
    Tensor3 cm = c(w.data());
    w[l] = x0;
    for (size_t t = 0; t < cp.v.size(); ++t) out[l].v[t] = (cp.v[t] - cm.v[t]) / (2 * h);
  }
  return out;
}

StructureFunctions sf_abelian(int n, int p, const Box& box) {
  StructureFunctions sf;
  sf.name = "abelian";
  sf.chart = ChartDomain::uniform(n, p, box.lo, box.hi, 3);
  sf.a = [n, p](const double*) { return Vec(static_cast<size_t>(p) * n, 0.0); };
  sf.c = [p](const double*) { return Tensor3(p); };
  sf.da = [n, p](const double*) { return std::vector<Vec>(n, Vec(static_cast<size_t>(p) * n, 0.0)); };
  sf.dc = [n, p](const double*) { return std::vector<Tensor3>(n, Tensor3(p)); };
  return sf;
}

StructureFunctions sf_tangent(int n, const Box& box) {
  StructureFunctions sf = sf_abelian(n, n, box);
  sf.name = "tangent";
  sf.a = [n](const double*) {
    Vec a(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) a[static_cast<size_t>(i) * n + i] = 1.0;
    return a;
  };
  return sf;
}

StructureFunctions sf_heisenberg() {
  StructureFunctions sf = sf_abelian(0, 3, Box{});
  sf.name = "heisenberg";
  sf.c = [](const double*) {
    Tensor3 c(3);
    c(0, 1, 2) = 1.0;
    c(1, 0, 2) = -1.0;
    return c;
  };
  return sf;
}

StructureFunctions sf_action_rotation(const Box& box) {
  StructureFunctions sf = sf_abelian(2, 1, box);
  sf.name = "action-rotation";
  sf.chart = ChartDomain::uniform(2, 1, box.lo, box.hi, 5);
  sf.a = [](const double* u) { return Vec{-u[1], u[0]}; };
  sf.da = [](const double*) { return std::vector<Vec>{Vec{0.0, 1.0}, Vec{-1.0, 0.0}}; };
  return sf;
}

StructureFunctions sf_constant(int n, int p, const Box& box, const Vec& a_rowmajor,
                               const std::vector<CEntry>& c_entries) {
  StructureFunctions sf = sf_abelian(n, p, box);
  sf.name = "constant";
  Vec a = a_rowmajor;
  if (a.empty()) a.assign(static_cast<size_t>(p) * n, 0.0);
  if (a.size() != static_cast<size_t>(p) * n) throw Error(ErrorCode::structural, "constant anchor table must have p*n entries");
  Tensor3 c(p);
  for (const auto& e : c_entries) {
    if (e.i < 0 || e.j < 0 || e.k < 0 || e.i >= p || e.j >= p || e.k >= p)
      throw Error(ErrorCode::structural, "structure constant index out of range");
    if (e.i == e.j && e.value != 0.0) throw Error(ErrorCode::structural, "structure constants must be antisymmetric in (i,j)");
    c(e.i, e.j, e.k) = e.value;
    c(e.j, e.i, e.k) = -e.value;
  }
  sf.a = [a](const double*) { return a; };
  sf.c = [c](const double*) { return c; };
  return sf;
}

Vec ScalarField::gradient(const double* u, int n, double h_fd) const {
  if (grad) return grad(u);
  Vec w(u, u + n), g(n);
  for (int l = 0; l < n; ++l) {
    double h = fd_step(w[l], h_fd), x0 = w[l];
    w[l] = x0 + h;
    double fp = value(w.data());
    w[l] = x0 - h;
    double fm = value(w.data());
    w[l] = x0;
    g[l] = (fp - fm) / (2 * h);
  }
  return g;
}

Vec Section::jacobian(const double* u, int n, int p, double h_fd) const {
  if (jac) return jac(u);
  Vec J(static_cast<size_t>(p) * n, 0.0);
  Vec w(u, u + n);
  for (int l = 0; l < n; ++l) {
    double h = fd_step(w[l], h_fd), x0 = w[l];
    w[l] = x0 + h;
    Vec xp = X(w.data());
    w[l] = x0 - h;
    Vec xm = X(w.data());
    w[l] = x0;
    for (int i = 0; i < p; ++i) J[static_cast<size_t>(i) * n + l] = (xp[i] - xm[i]) / (2 * h);
  }
  return J;
}

Section frame_section(int p, int i) {
  Section s;
  s.X = [p, i](const double*) {
    Vec v(p, 0.0);
    v[i] = 1.0;
    return v;
  };
  s.jac = [](const double*) { return Vec{}; };  // constant: no base dependence
  return s;
}

namespace {
// J is p x n; an empty J means identically zero.
double jget(const Vec& J, int i, int l, int n) { return J.empty() ? 0.0 : J[static_cast<size_t>(i) * n + l]; }
}  // namespace

ScalarField anchor_apply(const StructureFunctions& sf, const Section& X, const ScalarField& h) {
  ScalarField out;
  const int n = sf.n(), p = sf.p();
  const double hfd = sf.h_fd;
  auto sfp = std::make_shared<StructureFunctions>(sf);
  out.value = [sfp, X, h, n, p, hfd](const double* u) {
    Vec a = sfp->a_at(u);
    if (n == 0) return 0.0;
    Vec x = X(u);
    Vec g = h.gradient(u, n, hfd);
    double s = 0;
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < n; ++j) s += x[i] * a[static_cast<size_t>(i) * n + j] * g[j];
    return s;
  };
  return out;
}

Section bracket_sections(const StructureFunctions& sf, const Section& X, const Section& Y) {
  Section out;
  const int n = sf.n(), p = sf.p();
  auto sfp = std::make_shared<StructureFunctions>(sf);
  out.X = [sfp, X, Y, n, p](const double* u) {
    Vec a = sfp->a_at(u);
    Tensor3 c = sfp->c_at(u);
    Vec x = X(u), y = Y(u);
    Vec JX = n ? X.jacobian(u, n, p, sfp->h_fd) : Vec{};
    Vec JY = n ? Y.jacobian(u, n, p, sfp->h_fd) : Vec{};
    // rho(X) and rho(Y) as vector fields on the base
    Vec rx(n, 0.0), ry(n, 0.0);
    for (int i = 0; i < p; ++i)
      for (int l = 0; l < n; ++l) {
        rx[l] += x[i] * a[static_cast<size_t>(i) * n + l];
        ry[l] += y[i] * a[static_cast<size_t>(i) * n + l];
      }
    Vec z(p, 0.0);
    for (int k = 0; k < p; ++k) {
      double s = 0;
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) s += x[i] * y[j] * c(i, j, k);
      for (int l = 0; l < n; ++l) s += rx[l] * jget(JY, k, l, n) - ry[l] * jget(JX, k, l, n);
      z[k] = s;
    }
    return z;
  };
  return out;
}

AxiomReport check_axioms(const StructureFunctions& sf, double tol) {
  sf.chart.validate();
  if (sf.chart.samples.empty()) throw Error(ErrorCode::structural, "check_axioms needs sample points");
  const int n = sf.n(), p = sf.p();
  AxiomReport rep;
  rep.tol = tol;
  std::vector<Section> frame;
  for (int i = 0; i < p; ++i) frame.push_back(frame_section(p, i));
  // [e_i, e_j] as a section with analytic Jacobian from dc
  auto bracket_ij = [&sf, n, p](int i, int j) {
    Section s;
    s.X = [&sf, i, j, p](const double* u) {
      Tensor3 c = sf.c_at(u);
      Vec v(p);
      for (int k = 0; k < p; ++k) v[k] = c(i, j, k);
      return v;
    };
    s.jac = [&sf, i, j, n, p](const double* u) {
      if (n == 0) return Vec{};
      auto d = sf.dc_at(u);
      Vec J(static_cast<size_t>(p) * n);
      for (int k = 0; k < p; ++k)
        for (int l = 0; l < n; ++l) J[static_cast<size_t>(k) * n + l] = d[l](i, j, k);
      return J;
    };
    return s;
  };
  for (const auto& u : sf.chart.samples) {
    const double* up = u.data();
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        for (int k = 0; k < p; ++k) {
          Vec t1 = bracket_sections(sf, bracket_ij(i, j), frame[k])(up);
          Vec t2 = bracket_sections(sf, bracket_ij(j, k), frame[i])(up);
          Vec t3 = bracket_sections(sf, bracket_ij(k, i), frame[j])(up);
          for (int m = 0; m < p; ++m)
            rep.jacobi_residual = std::max(rep.jacobi_residual, std::fabs(t1[m] + t2[m] + t3[m]));
        }
    if (n == 0) continue;
    Vec a = sf.a_at(up);
    Tensor3 c = sf.c_at(up);
    auto da = sf.da_at(up);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        for (int l = 0; l < n; ++l) {
          double lhs = 0;
          for (int k = 0; k < p; ++k) lhs += c(i, j, k) * a[static_cast<size_t>(k) * n + l];
          double rhs = 0;
          for (int m = 0; m < n; ++m)
            rhs += a[static_cast<size_t>(i) * n + m] * da[m][static_cast<size_t>(j) * n + l] -
                   a[static_cast<size_t>(j) * n + m] * da[m][static_cast<size_t>(i) * n + l];
          rep.anchor_residual = std::max(rep.anchor_residual, std::fabs(lhs - rhs));
        }
  }
  rep.pass = rep.jacobi_residual <= tol && rep.anchor_residual <= tol;
  return rep;
}

void PhaseFunction::gradient(const double* u, const double* e, cplx* g) const {
  if (grad) {
    grad(u, e, g);
    return;
  }
  Vec w(u, u + n), v(e, e + p);
  for (int l = 0; l < n; ++l) {
    double h = fd_step(w[l], h_fd), x0 = w[l];
    w[l] = x0 + h;
    cplx fp = f(w.data(), v.data());
    w[l] = x0 - h;
    cplx fm = f(w.data(), v.data());
    w[l] = x0;
    g[l] = (fp - fm) / (2 * h);
  }
  for (int i = 0; i < p; ++i) {
    double h = fd_step(v[i], h_fd), x0 = v[i];
    v[i] = x0 + h;
    cplx fp = f(w.data(), v.data());
    v[i] = x0 - h;
    cplx fm = f(w.data(), v.data());
    v[i] = x0;
    g[n + i] = (fp - fm) / (2 * h);
  }
}

PhaseFunction poisson_bracket_dual(const StructureFunctions& sf, const PhaseFunction& phi, const PhaseFunction& psi,
                                   SignConvention sign) {
  if (phi.n != sf.n() || psi.n != sf.n() || phi.p != sf.p() || psi.p != sf.p())
    throw Error(ErrorCode::structural, "phase function dimensions do not match the algebroid");
  PhaseFunction out;
  out.n = sf.n();
  out.p = sf.p();
  out.label = "{" + phi.label + "," + psi.label + "}";
  out.real_valued = phi.real_valued && psi.real_valued;
  const double s = sign == SignConvention::standard ? 1.0 : -1.0;
  const int n = sf.n(), p = sf.p();
  // The structure functions are held by value so the result outlives its inputs.
  auto sfp = std::make_shared<StructureFunctions>(sf);
  out.f = [sfp, phi, psi, s, n, p](const double* u, const double* e) {
    Vec a = sfp->a_at(u);
    Tensor3 c = sfp->c_at(u);
    cplx gf[16], gg[16];
    std::vector<cplx> bf, bg;
    cplx* pf = gf;
    cplx* pg = gg;
    if (n + p > 16) {
      bf.resize(n + p);
      bg.resize(n + p);
      pf = bf.data();
      pg = bg.data();
    }
    phi.gradient(u, e, pf);
    psi.gradient(u, e, pg);
    cplx acc = 0;
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < n; ++j) {
        double aij = a[static_cast<size_t>(i) * n + j];
        if (aij != 0.0) acc += aij * (pf[n + i] * pg[j] - pf[j] * pg[n + i]);
      }
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        for (int k = 0; k < p; ++k) {
          double cijk = c(i, j, k);
          if (cijk != 0.0) acc += cijk * e[k] * pf[n + i] * pg[n + j];
        }
    return s * acc;
  };
  return out;
}

PhaseFunction pf_product(const PhaseFunction& a, const PhaseFunction& b) {
  PhaseFunction out;
  out.n = a.n;
  out.p = a.p;
  out.label = a.label + "*" + b.label;
  out.real_valued = a.real_valued && b.real_valued;
  out.f = [a, b](const double* u, const double* e) { return a(u, e) * b(u, e); };
  const int m = a.n + a.p;
  out.grad = [a, b, m](const double* u, const double* e, cplx* g) {
    std::vector<cplx> ga(m), gb(m);
    a.gradient(u, e, ga.data());
    b.gradient(u, e, gb.data());
    cplx va = a(u, e), vb = b(u, e);
    for (int i = 0; i < m; ++i) g[i] = ga[i] * vb + va * gb[i];
  };
  if (a.band_limit >= 0 && b.band_limit >= 0) out.band_limit = a.band_limit + b.band_limit;
  return out;
}

PhaseFunction pf_linear(cplx alpha, const PhaseFunction& a, cplx beta, const PhaseFunction& b) {
  PhaseFunction out;
  out.n = a.n;
  out.p = a.p;
  out.label = "lin(" + a.label + "," + b.label + ")";
  out.real_valued = a.real_valued && b.real_valued && alpha.imag() == 0 && beta.imag() == 0;
  out.f = [=](const double* u, const double* e) { return alpha * a(u, e) + beta * b(u, e); };
  const int m = a.n + a.p;
  out.grad = [=](const double* u, const double* e, cplx* g) {
    std::vector<cplx> ga(m), gb(m);
    a.gradient(u, e, ga.data());
    b.gradient(u, e, gb.data());
    for (int i = 0; i < m; ++i) g[i] = alpha * ga[i] + beta * gb[i];
  };
  if (a.band_limit >= 0 && b.band_limit >= 0) out.band_limit = std::max(a.band_limit, b.band_limit);
  return out;
}

PhaseFunction pf_conj(const PhaseFunction& a) {
  PhaseFunction out = a;
  out.label = "conj(" + a.label + ")";
  out.f = [a](const double* u, const double* e) { return std::conj(a(u, e)); };
  const int m = a.n + a.p;
  out.grad = [a, m](const double* u, const double* e, cplx* g) {
    a.gradient(u, e, g);
    for (int i = 0; i < m; ++i) g[i] = std::conj(g[i]);
  };
  return out;
}

PhaseFunction pf_zero(int n, int p) {
  PhaseFunction z;
  z.n = n;
  z.p = p;
  z.label = "0";
  z.real_valued = true;
  z.band_limit = 0;
  z.f = [](const double*, const double*) { return cplx(0); };
  z.grad = [n, p](const double*, const double*, cplx* g) {
    for (int i = 0; i < n + p; ++i) g[i] = 0;
  };
  return z;
}

}  // namespace sdq
