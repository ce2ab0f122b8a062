// SPDX-License-Identifier: Apache-2.0
#include "sdq/groupoid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sdq/fourier.hpp"

namespace sdq {

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::finite_pair: return "finite-pair";
    case ModelKind::grid_pair: return "grid-pair";
    case ModelKind::exp_nilpotent_group: return "exp-nilpotent-group";
    case ModelKind::transformation: return "transformation";
  }
  return "unknown";
}

GroupoidModel GroupoidModel::finite_pair(int n, Vec weights) {
  GroupoidModel m;
  m.kind = ModelKind::finite_pair;
  m.units = n;
  m.unit_weights = std::move(weights);
  m.validate();
  return m;
}

GroupoidModel GroupoidModel::grid_pair(double lo, double hi) {
  GroupoidModel m;
  m.kind = ModelKind::grid_pair;
  m.base_lo = lo;
  m.base_hi = hi;
  m.validate();
  return m;
}

GroupoidModel GroupoidModel::abelian_group(int d) {
  GroupoidModel m;
  m.kind = ModelKind::exp_nilpotent_group;
  m.dim = d;
  m.c = Tensor3(d);
  m.validate();
  return m;
}

GroupoidModel GroupoidModel::heisenberg_group() {
  GroupoidModel m = abelian_group(3);
  m.c(0, 1, 2) = 1.0;
  m.c(1, 0, 2) = -1.0;
  m.validate();
  return m;
}

GroupoidModel GroupoidModel::rotation_action(Vec radii, Vec bloch) {
  GroupoidModel m;
  m.kind = ModelKind::transformation;
  m.dim = 1;
  m.c = Tensor3(1);
  m.radii = std::move(radii);
  m.bloch_phases = std::move(bloch);
  m.base_lo = -4;
  m.base_hi = 4;
  m.validate();
  return m;
}

void GroupoidModel::validate() const {
  switch (kind) {
    case ModelKind::finite_pair:
      if (units < 1) throw Error(ErrorCode::structural, "finite-pair needs at least one unit");
      if (!unit_weights.empty()) {
        if (static_cast<int>(unit_weights.size()) != units)
          throw Error(ErrorCode::structural, "finite-pair weights must have one entry per unit");
        for (double w : unit_weights)
          if (!(w > 0)) throw Error(ErrorCode::structural, "Haar weights must be strictly positive");
      }
      break;
    case ModelKind::grid_pair:
      if (!(base_lo < base_hi)) throw Error(ErrorCode::structural, "grid-pair base box must have lo < hi");
      break;
    case ModelKind::exp_nilpotent_group:
    case ModelKind::transformation: {
      if (dim < 1 || c.p != dim) throw Error(ErrorCode::structural, "group dimension and structure constants disagree");
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          for (int k = 0; k < dim; ++k) {
            if (c(i, j, k) != -c(j, i, k)) throw Error(ErrorCode::structural, "structure constants must be antisymmetric");
            for (int q = 0; q < dim; ++q) {
              double s = 0;
              for (int l = 0; l < dim; ++l) s += c(i, j, l) * c(l, k, q);
              if (std::fabs(s) > 1e-12) throw Error(ErrorCode::structural, "group is not nilpotent of step <= 2");
            }
          }
      if (kind == ModelKind::transformation) {
        if (action != "rotation") throw Error(ErrorCode::unsupported, "only the rotation action is available");
        if (dim != 1) throw Error(ErrorCode::unsupported, "rotation action needs a one-dimensional acting group");
        for (double r : radii)
          if (!(r >= 0)) throw Error(ErrorCode::structural, "orbit radii must be non-negative");
      }
      break;
    }
  }
}

bool GroupoidModel::is_abelian() const {
  for (double v : c.v)
    if (v != 0) return false;
  return true;
}

int GroupoidModel::fiber_dim() const {
  switch (kind) {
    case ModelKind::finite_pair: return 0;
    case ModelKind::grid_pair: return 1;
    case ModelKind::exp_nilpotent_group: return dim;
    case ModelKind::transformation: return 1;
  }
  return 0;
}

int GroupoidModel::base_dim() const {
  switch (kind) {
    case ModelKind::finite_pair: return 0;
    case ModelKind::grid_pair: return 1;
    case ModelKind::exp_nilpotent_group: return 0;
    case ModelKind::transformation: return 2;
  }
  return 0;
}

int GroupoidModel::arrow_dim() const {
  switch (kind) {
    case ModelKind::finite_pair:
    case ModelKind::grid_pair: return 2;
    case ModelKind::exp_nilpotent_group: return dim;
    case ModelKind::transformation: return 3;
  }
  return 0;
}

Vec GroupoidModel::group_mul(const Vec& x, const Vec& y) const {
  Vec z(dim);
  for (int k = 0; k < dim; ++k) z[k] = x[k] + y[k];
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double xy = x[i] * y[j];
      if (xy == 0) continue;
      for (int k = 0; k < dim; ++k) z[k] += 0.5 * c(i, j, k) * xy;
    }
  return z;
}

Vec GroupoidModel::act(double x, const Vec& m) const {
  double cs = std::cos(x), sn = std::sin(x);
  // R(-x) m
  return Vec{cs * m[0] + sn * m[1], -sn * m[0] + cs * m[1]};
}

Vec GroupoidModel::range(const Vec& g) const {
  switch (kind) {
    case ModelKind::finite_pair:
    case ModelKind::grid_pair: return Vec{g[0]};
    case ModelKind::exp_nilpotent_group: return Vec{};
    case ModelKind::transformation: return Vec{g[1], g[2]};
  }
  return {};
}

Vec GroupoidModel::source(const Vec& g) const {
  switch (kind) {
    case ModelKind::finite_pair:
    case ModelKind::grid_pair: return Vec{g[1]};
    case ModelKind::exp_nilpotent_group: return Vec{};
    case ModelKind::transformation: return act(-g[0], Vec{g[1], g[2]});
  }
  return {};
}

Vec GroupoidModel::compose(const Vec& g, const Vec& h) const {
  Vec sg = source(g), rh = range(h);
  double gap = 0;
  for (size_t i = 0; i < sg.size(); ++i) gap = std::max(gap, std::fabs(sg[i] - rh[i]));
  if (gap > 1e-9) throw Error(ErrorCode::structural, "arrows are not composable");
  switch (kind) {
    case ModelKind::finite_pair:
    case ModelKind::grid_pair: return Vec{g[0], h[1]};
    case ModelKind::exp_nilpotent_group: return group_mul(g, h);
    case ModelKind::transformation: return Vec{g[0] + h[0], g[1], g[2]};
  }
  return {};
}

Vec GroupoidModel::inverse(const Vec& g) const {
  switch (kind) {
    case ModelKind::finite_pair:
    case ModelKind::grid_pair: return Vec{g[1], g[0]};
    case ModelKind::exp_nilpotent_group: {
      Vec r(g);
      for (auto& v : r) v = -v;
      return r;
    }
    case ModelKind::transformation: {
      Vec s = source(g);
      return Vec{-g[0], s[0], s[1]};
    }
  }
  return {};
}

Vec GroupoidModel::unit(const Vec& u) const {
  switch (kind) {
    case ModelKind::finite_pair:
    case ModelKind::grid_pair: return Vec{u[0], u[0]};
    case ModelKind::exp_nilpotent_group: return Vec(dim, 0.0);
    case ModelKind::transformation: return Vec{0.0, u[0], u[1]};
  }
  return {};
}

Vec GroupoidModel::random_unit(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> U(-1, 1);
  switch (kind) {
    case ModelKind::finite_pair: return Vec{static_cast<double>(std::uniform_int_distribution<int>(0, units - 1)(rng))};
    case ModelKind::grid_pair: {
      std::uniform_real_distribution<double> B(base_lo, base_hi);
      return Vec{B(rng)};
    }
    case ModelKind::exp_nilpotent_group: return Vec{};
    case ModelKind::transformation: return Vec{2 * U(rng), 2 * U(rng)};
  }
  return {};
}

Vec GroupoidModel::random_arrow(std::mt19937_64& rng, const Vec* with_source) const {
  std::uniform_real_distribution<double> U(-1, 1);
  Vec s = with_source ? *with_source : random_unit(rng);
  switch (kind) {
    case ModelKind::finite_pair:
    case ModelKind::grid_pair: return Vec{random_unit(rng)[0], s[0]};
    case ModelKind::exp_nilpotent_group: {
      Vec g(dim);
      for (auto& v : g) v = 2 * U(rng);
      return g;
    }
    case ModelKind::transformation: {
      double x = 3 * U(rng);
      Vec m = act(x, s);
      return Vec{x, m[0], m[1]};
    }
  }
  return {};
}

GroupoidAxiomReport check_groupoid_axioms(const GroupoidModel& m, std::uint64_t seed, int trials, double tol) {
  m.validate();
  GroupoidAxiomReport rep;
  auto dist = [](const Vec& a, const Vec& b) {
    double d = 0;
    for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
  };
  auto check_triple = [&](const Vec& g, const Vec& h, const Vec& k) {
    rep.associativity = std::max(rep.associativity, dist(m.compose(m.compose(g, h), k), m.compose(g, m.compose(h, k))));
    Vec gi = m.inverse(g);
    rep.source_range = std::max(rep.source_range, dist(m.range(gi), m.source(g)));
    rep.source_range = std::max(rep.source_range, dist(m.source(gi), m.range(g)));
    rep.inverse = std::max(rep.inverse, dist(m.compose(g, gi), m.unit(m.range(g))));
    rep.inverse = std::max(rep.inverse, dist(m.compose(gi, g), m.unit(m.source(g))));
  };
  if (m.kind == ModelKind::finite_pair) {
    const int n = m.units;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) check_triple(Vec{double(a), double(b)}, Vec{double(b), double(c)}, Vec{double(c), double(d)});
  } else {
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
      Vec k = m.random_arrow(rng);
      Vec rk = m.range(k);
      Vec h = m.random_arrow(rng, &rk);
      Vec rh = m.range(h);
      Vec g = m.random_arrow(rng, &rh);
      check_triple(g, h, k);
    }
  }
  rep.pass = rep.associativity <= tol && rep.inverse <= tol && rep.source_range <= tol;
  return rep;
}

// ---- group samples ----

GroupSamples GroupSamples::zeros(std::vector<int> count, Vec h) {
  GroupSamples s;
  s.m = static_cast<int>(count.size());
  if (h.size() != count.size()) throw Error(ErrorCode::structural, "group samples: spacing and count sizes differ");
  size_t tot = 1;
  for (int c : count) {
    if (c < 1 || c % 2 == 0) throw Error(ErrorCode::structural, "group samples need an odd point count per axis");
    tot *= static_cast<size_t>(c);
  }
  for (double v : h)
    if (!(v > 0)) throw Error(ErrorCode::structural, "group samples need positive spacing");
  s.count = std::move(count);
  s.h = std::move(h);
  s.values.assign(tot, cplx(0));
  return s;
}

void GroupSamples::point(size_t idx, double* x) const {
  for (int d = 0; d < m; ++d) {
    int k = static_cast<int>(idx % count[d]);
    idx /= count[d];
    x[d] = (k - (count[d] - 1) / 2) * h[d];
  }
}

cplx GroupSamples::at(const double* x) const {
  size_t idx = 0, mul = 1;
  bool inside = true;
  for (int d = 0; d < m; ++d) {
    double t = x[d] / h[d];
    double r = std::round(t);
    if (std::fabs(t - r) > 1e-6) throw Error(ErrorCode::structural, "point is not on the sample lattice");
    long k = static_cast<long>(r) + (count[d] - 1) / 2;
    if (k < 0 || k >= count[d]) inside = false;
    idx += static_cast<size_t>(std::max(0L, k)) * mul;
    mul *= static_cast<size_t>(count[d]);
  }
  return inside ? values[idx] : cplx(0);
}

double GroupSamples::cell_volume() const {
  double v = 1;
  for (double x : h) v *= x;
  return v;
}

void AlgebraElement::validate() const {
  switch (rep) {
    case RepKind::kernel:
      if (kernel.n < 0 || kernel.data.size() != static_cast<size_t>(kernel.n) * kernel.width())
        throw Error(ErrorCode::structural, "kernel storage is inconsistent");
      for (const auto& v : kernel.data)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error(ErrorCode::structural, "non-finite kernel entry");
      break;
    case RepKind::group_samples:
      for (const auto& v : samples.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error(ErrorCode::structural, "non-finite sample");
      break;
    case RepKind::slices:
      for (const auto& s : slices)
        for (const auto& v : s.K.data)
          if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error(ErrorCode::structural, "non-finite slice entry");
      break;
  }
}

AlgebraElement make_kernel_element(ModelKind model, BandedKernel K, double hbar) {
  AlgebraElement e;
  e.model = model;
  e.rep = RepKind::kernel;
  e.hbar = hbar;
  e.kernel = std::move(K);
  return e;
}

namespace {

void check_compatible(const AlgebraElement& f, const AlgebraElement& g) {
  if (f.model != g.model || f.rep != g.rep) throw Error(ErrorCode::structural, "elements belong to different models");
  if (std::fabs(f.hbar - g.hbar) > 1e-14 * std::max(1.0, std::fabs(f.hbar)))
    throw Error(ErrorCode::structural, "elements carry different hbar tags");
  if (f.rep == RepKind::slices) {
    if (f.slices.size() != g.slices.size()) throw Error(ErrorCode::structural, "slice families differ");
    for (size_t i = 0; i < f.slices.size(); ++i)
      if (f.slices[i].label != g.slices[i].label || f.slices[i].K.n != g.slices[i].K.n)
        throw Error(ErrorCode::structural, "slice labels differ");
  }
  if (f.rep == RepKind::group_samples) {
    if (f.samples.count != g.samples.count || f.samples.h != g.samples.h || f.c.v != g.c.v)
      throw Error(ErrorCode::structural, "group sample grids differ");
  }
}

Vec group_mul_c(const Tensor3& c, const Vec& x, const Vec& y) {
  const int d = c.p;
  Vec z(d);
  for (int k = 0; k < d; ++k) z[k] = x[k] + y[k];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double xy = x[i] * y[j];
      if (xy == 0) continue;
      for (int k = 0; k < d; ++k) z[k] += 0.5 * c(i, j, k) * xy;
    }
  return z;
}

}  // namespace

cplx convolve_at(const AlgebraElement& f, const AlgebraElement& g, const double* x) {
  check_compatible(f, g);
  if (f.rep != RepKind::group_samples) throw Error(ErrorCode::unsupported, "convolve_at works on group samples");
  const GroupSamples& a = f.samples;
  const int d = a.m;
  Vec z(d), xv(x, x + d);
  cplx acc = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a.values[i] == cplx(0)) continue;
    a.point(i, z.data());
    Vec zi(z);
    for (auto& v : zi) v = -v;
    Vec y = group_mul_c(f.c, zi, xv);
    acc += a.values[i] * g.samples.at(y.data());
  }
  return acc * a.cell_volume();
}

AlgebraElement convolve(const AlgebraElement& f, const AlgebraElement& g) {
  check_compatible(f, g);
  AlgebraElement out = f;
  switch (f.rep) {
    case RepKind::kernel: out.kernel = compose(f.kernel, g.kernel); break;
    case RepKind::slices:
      for (size_t i = 0; i < f.slices.size(); ++i) out.slices[i].K = compose(f.slices[i].K, g.slices[i].K);
      break;
    case RepKind::group_samples: {
      Vec x(f.samples.m);
      for (size_t i = 0; i < f.samples.size(); ++i) {
        f.samples.point(i, x.data());
        out.samples.values[i] = convolve_at(f, g, x.data());
      }
      break;
    }
  }
  return out;
}

AlgebraElement involute(const AlgebraElement& f) {
  AlgebraElement out = f;
  switch (f.rep) {
    case RepKind::kernel: out.kernel = f.kernel.adjoint(); break;
    case RepKind::slices:
      for (auto& s : out.slices) s.K = s.K.adjoint();
      break;
    case RepKind::group_samples: {
      // unimodular: f*(x) = conj f(x^{-1}) = conj f(-x); the lattice is symmetric
      const size_t n = f.samples.size();
      for (size_t i = 0; i < n; ++i) out.samples.values[n - 1 - i] = std::conj(f.samples.values[i]);
      break;
    }
  }
  return out;
}

AlgebraElement linear_combination(cplx a, const AlgebraElement& f, cplx b, const AlgebraElement& g) {
  check_compatible(f, g);
  AlgebraElement out = f;
  switch (f.rep) {
    case RepKind::kernel: out.kernel = axpby(a, f.kernel, b, g.kernel); break;
    case RepKind::slices:
      for (size_t i = 0; i < f.slices.size(); ++i) out.slices[i].K = axpby(a, f.slices[i].K, b, g.slices[i].K);
      break;
    case RepKind::group_samples:
      for (size_t i = 0; i < f.samples.size(); ++i) out.samples.values[i] = a * f.samples.values[i] + b * g.samples.values[i];
      break;
  }
  return out;
}

double element_distance(const AlgebraElement& f, const AlgebraElement& g) {
  check_compatible(f, g);
  double d = 0;
  switch (f.rep) {
    case RepKind::kernel: return max_abs_diff(f.kernel, g.kernel);
    case RepKind::slices:
      for (size_t i = 0; i < f.slices.size(); ++i) d = std::max(d, max_abs_diff(f.slices[i].K, g.slices[i].K));
      return d;
    case RepKind::group_samples:
      for (size_t i = 0; i < f.samples.size(); ++i) d = std::max(d, std::abs(f.samples.values[i] - g.samples.values[i]));
      return d;
  }
  return d;
}

double self_adjointness_defect(const AlgebraElement& f) { return element_distance(f, involute(f)); }

NormResult reduced_norm(const AlgebraElement& f, const NormOptions& opt) {
  f.validate();
  switch (f.rep) {
    case RepKind::kernel: return operator_norm(f.kernel, opt);
    case RepKind::slices: {
      // Largest Schur bound first; a slice whose bound cannot beat the running max is skipped.
      std::vector<std::pair<double, size_t>> order;
      for (size_t i = 0; i < f.slices.size(); ++i) order.emplace_back(f.slices[i].K.schur_bound(), i);
      std::sort(order.begin(), order.end(), [](auto& a, auto& b) { return a.first > b.first; });
      NormResult best;
      for (auto& [bound, i] : order) {
        if (bound <= best.value) break;
        NormResult r = operator_norm(f.slices[i].K, opt);
        best.iterations += r.iterations;
        if (r.value > best.value) {
          best.value = r.value;
          best.residual = r.residual;
        }
      }
      return best;
    }
    case RepKind::group_samples: {
      bool abelian = std::all_of(f.c.v.begin(), f.c.v.end(), [](double v) { return v == 0; });
      if (!abelian)
        throw Error(ErrorCode::unsupported, "reduced_norm of non-abelian group samples: convert to the slice picture first");
      // Gelfand transform sup on a 4x zero-padded lattice
      const GroupSamples& s = f.samples;
      std::vector<int> dims(s.m);
      size_t tot = 1;
      for (int d = 0; d < s.m; ++d) {
        dims[d] = 4 * s.count[d];
        tot *= static_cast<size_t>(dims[d]);
      }
      CVec in(tot, 0.0), out(tot);
      std::vector<int> k(s.m);
      for (size_t i = 0; i < s.size(); ++i) {
        size_t r = i, j = 0, mul = 1;
        for (int d = 0; d < s.m; ++d) {
          k[d] = static_cast<int>(r % s.count[d]);
          r /= s.count[d];
          j += k[d] * mul;
          mul *= dims[d];
        }
        in[j] = s.values[i];
      }
      dft_nd(dims, in.data(), out.data(), -1);
      NormResult res;
      for (const auto& v : out) res.value = std::max(res.value, std::abs(v));
      res.value *= s.cell_volume();
      return res;
    }
  }
  return {};
}

// ---- exponential maps ----

ExpPair exp_maps(const GroupoidModel& m, const Vec& X, const Vec& u) {
  ExpPair e;
  switch (m.kind) {
    case ModelKind::finite_pair: throw Error(ErrorCode::unsupported, "finite-pair groupoid has no exponential map");
    case ModelKind::grid_pair: {
      if (X.size() != 1 || u.size() != 1) throw Error(ErrorCode::structural, "grid-pair: X and u are scalars");
      double x = u[0], v = X[0];
      e.left = Vec{x, x + v};
      e.weyl = Vec{x - 0.5 * v, x + 0.5 * v};
      for (double c : {e.left[0], e.left[1], e.weyl[0], e.weyl[1]})
        if (c < m.base_lo - 1e-12 || c > m.base_hi + 1e-12)
          throw Error(ErrorCode::out_of_neighbourhood, "exponential image leaves the grid box");
      return e;
    }
    case ModelKind::exp_nilpotent_group:
      if (static_cast<int>(X.size()) != m.dim) throw Error(ErrorCode::structural, "group: X has wrong dimension");
      e.left = X;
      e.weyl = X;
      return e;
    case ModelKind::transformation: {
      if (X.size() != 1 || u.size() != 2) throw Error(ErrorCode::structural, "transformation: X scalar, u planar");
      e.left = Vec{X[0], u[0], u[1]};
      Vec mid = m.act(0.5 * X[0], u);
      e.weyl = Vec{X[0], mid[0], mid[1]};
      return e;
    }
  }
  return e;
}

Eigen::Matrix3d heisenberg_matrix(const Vec& x) {
  Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
  M(0, 1) = x[0];
  M(1, 2) = x[1];
  M(0, 2) = x[2] + 0.5 * x[0] * x[1];
  return M;
}

// ---- local parametrizations and BCH ----

LocalParametrization parametrization_for(const GroupoidModel& m) {
  LocalParametrization par;
  switch (m.kind) {
    case ModelKind::finite_pair: throw Error(ErrorCode::unsupported, "finite-pair groupoid has no local parametrization");
    case ModelKind::grid_pair:
      par.n = 1;
      par.p = 1;
      // arrow Exp^L(v at u) = (u, u + v): source u + v
      par.sigma = [](const Vec& u, const Vec& v) { return Vec{u[0] + v[0]}; };
      par.pmap = [](const Vec&, const Vec& v, const Vec& w) { return Vec{v[0] + w[0]}; };
      return par;
    case ModelKind::exp_nilpotent_group:
      par.n = 0;
      par.p = m.dim;
      par.sigma = [](const Vec&, const Vec&) { return Vec{}; };
      par.pmap = [m](const Vec&, const Vec& v, const Vec& w) { return m.group_mul(v, w); };
      return par;
    case ModelKind::transformation:
      par.n = 2;
      par.p = 1;
      // arrow (v, u) has source v^{-1} u = R(v) u
      par.sigma = [m](const Vec& u, const Vec& v) { return m.act(-v[0], u); };
      par.pmap = [](const Vec&, const Vec& v, const Vec& w) { return Vec{v[0] + w[0]}; };
      return par;
  }
  return par;
}

double check_parametrization(const LocalParametrization& par, const std::vector<Vec>& base, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  double worst = 0;
  Vec zero(par.p, 0.0);
  for (const auto& u : base)
    for (int t = 0; t < 8; ++t) {
      Vec v(par.p), w(par.p);
      for (auto& x : v) x = 0.5 * U(rng);
      for (auto& x : w) x = 0.5 * U(rng);
      Vec s0 = par.sigma(u, zero);
      for (int i = 0; i < par.n; ++i) worst = std::max(worst, std::fabs(s0[i] - u[i]));
      Vec p1 = par.pmap(u, v, zero), p2 = par.pmap(u, zero, w);
      for (int i = 0; i < par.p; ++i) worst = std::max({worst, std::fabs(p1[i] - v[i]), std::fabs(p2[i] - w[i])});
    }
  return worst;
}

BchResult bch_extract(const LocalParametrization& par, const Vec& u, double h) {
  const int p = par.p, n = par.n;
  BchResult r;
  r.B = Tensor3(p);
  r.c = Tensor3(p);
  r.a.assign(static_cast<size_t>(p) * n, 0.0);
  Vec v(p, 0.0), w(p, 0.0);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      auto eval = [&](double si, double sj) {
        std::fill(v.begin(), v.end(), 0.0);
        std::fill(w.begin(), w.end(), 0.0);
        v[i] = si * h;
        w[j] = sj * h;
        return par.pmap(u, v, w);
      };
      Vec pp = eval(1, 1), pm = eval(1, -1), mp = eval(-1, 1), mm = eval(-1, -1);
      for (int k = 0; k < p; ++k) {
        double d = (pp[k] - pm[k] - mp[k] + mm[k]) / (4 * h * h);
        if (!std::isfinite(d)) throw Error(ErrorCode::evaluation, "non-finite mixed difference in bch_extract");
        r.B(i, j, k) = d;
      }
    }
  for (int i = 0; i < p; ++i) {
    std::fill(v.begin(), v.end(), 0.0);
    v[i] = h;
    Vec sp = par.sigma(u, v);
    v[i] = -h;
    Vec sm = par.sigma(u, v);
    for (int j = 0; j < n; ++j) {
      double d = (sp[j] - sm[j]) / (2 * h);
      if (!std::isfinite(d)) throw Error(ErrorCode::evaluation, "non-finite anchor difference in bch_extract");
      r.a[static_cast<size_t>(i) * n + j] = d;
    }
  }
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      for (int k = 0; k < p; ++k) r.c(i, j, k) = r.B(i, j, k) - r.B(j, i, k);
  return r;
}

StructureFunctions structure_from_parametrization(const LocalParametrization& par, const ChartDomain& chart,
                                                  double h_fd) {
  StructureFunctions sf;
  sf.name = "extracted";
  sf.chart = chart;
  sf.mode = DerivativeMode::finite_difference;
  const int n = par.n;
  sf.a = [par, h_fd, n](const double* u) { return bch_extract(par, Vec(u, u + n), h_fd).a; };
  sf.c = [par, h_fd, n](const double* u) { return bch_extract(par, Vec(u, u + n), h_fd).c; };
  return sf;
}

}  // namespace sdq
