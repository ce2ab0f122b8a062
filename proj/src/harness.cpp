// SPDX-License-Identifier: Apache-2.0
#include "sdq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace sdq {

namespace {

struct Quantized {
  AlgebraElement Qf, Qg, Qbr, Qfg;
};

Quantized quantize_all(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g, double hbar) {
  PhaseFunction br = poisson_bracket_dual(sc.sf, f, g, sc.sign);
  PhaseFunction fg = pf_product(f, g);
  return Quantized{weyl_quantize(sc, f, hbar), weyl_quantize(sc, g, hbar), weyl_quantize(sc, br, hbar),
                   weyl_quantize(sc, fg, hbar)};
}

// (i hbar)^{-1} scale * [Qf, Qg] - Q{f,g}
AlgebraElement dirac_defect(const Quantized& q, double hbar, double scale) {
  AlgebraElement comm = linear_combination(1.0, convolve(q.Qf, q.Qg), -1.0, convolve(q.Qg, q.Qf));
  return linear_combination(cplx(0, -scale / hbar), comm, -1.0, q.Qbr);
}

}  // namespace

double dirac_residual(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g, double hbar,
                      const NormOptions& opt) {
  if (!(hbar > 0)) throw Error(ErrorCode::domain, "dirac_residual needs hbar > 0");
  Quantized q = quantize_all(sc, f, g, hbar);
  return reduced_norm(dirac_defect(q, hbar, 1.0), opt).value;
}

double dirac_residual_semistrict(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g,
                                 double hbar, const NormOptions& opt) {
  if (!(hbar > 0)) throw Error(ErrorCode::domain, "dirac_residual needs hbar > 0");
  const double chi = sc.chi(hbar);
  if (chi == 0) return 0.0;
  Quantized q = quantize_all(sc, f, g, hbar);
  // Q(f x g) = chi^2 Qf * Qg, and the seminorm carries one more chi.
  return chi * reduced_norm(dirac_defect(q, hbar, chi * chi), opt).value;
}

double mult_residual(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g, double hbar,
                     const NormOptions& opt) {
  if (!(hbar > 0)) throw Error(ErrorCode::domain, "mult_residual needs hbar > 0");
  Quantized q = quantize_all(sc, f, g, hbar);
  return reduced_norm(linear_combination(1.0, convolve(q.Qf, q.Qg), -1.0, q.Qfg), opt).value;
}

SweepRow sweep_point(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g, double hbar,
                     const NormOptions& opt) {
  if (!(hbar > 0)) throw Error(ErrorCode::domain, "sweep points need hbar > 0");
  Quantized q = quantize_all(sc, f, g, hbar);
  SweepRow r;
  r.hbar = hbar;
  const double chi = sc.chi(hbar);
  double nf = reduced_norm(q.Qf, opt).value, ng = reduced_norm(q.Qg, opt).value;
  r.seminorm_f = chi * nf;
  r.seminorm_g = chi * ng;
  r.sup_norm_f = sup_norm(sc, f);
  r.noise_floor = 1e-13 * nf * ng / hbar;
  // Defects at roundoff level have clustered singular values; resolving them far below the floor is enough.
  NormOptions dopt = opt;
  dopt.abs_tol = 1e-3 * r.noise_floor;
  AlgebraElement fg = convolve(q.Qf, q.Qg);
  AlgebraElement comm = linear_combination(1.0, fg, -1.0, convolve(q.Qg, q.Qf));
  r.dirac_residual = reduced_norm(linear_combination(cplx(0, -1.0 / hbar), comm, -1.0, q.Qbr), dopt).value;
  r.mult_residual = reduced_norm(linear_combination(1.0, fg, -1.0, q.Qfg), dopt).value;
  return r;
}

SweepResult run_sweep(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g,
                      const Vec& hbars, const HarnessOptions& opt) {
  SweepResult res;
  res.scenario = sc.name;
  Vec hs = hbars;
  std::sort(hs.begin(), hs.end(), std::greater<double>());
  res.rows.resize(hs.size());
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= hs.size()) return;
      try {
        res.rows[i] = sweep_point(sc, f, g, hs[i], opt.norm);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  int T = std::max(1, std::min<int>(opt.threads, static_cast<int>(hs.size())));
  if (T == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < T; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
  Vec x, y;
  for (const auto& r : res.rows)
    if (r.dirac_residual > 0) {
      x.push_back(r.hbar);
      y.push_back(r.dirac_residual);
    }
  if (x.size() >= 2) res.fit = loglog_fit(x, y);
  return res;
}

LogLogFit loglog_fit(const Vec& x, const Vec& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::domain, "log-log fit needs at least two points");
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw Error(ErrorCode::domain, "log-log fit needs positive data");
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double den = n * sxx - sx * sx;
  if (den == 0) throw Error(ErrorCode::domain, "log-log fit needs distinct abscissae");
  LogLogFit fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (size_t i = 0; i < n; ++i) {
    double e = std::log(y[i]) - (fit.intercept + fit.slope * std::log(x[i]));
    ss += e * e;
  }
  fit.fit_residual = std::sqrt(ss / n);
  return fit;
}

ContinuityScan field_continuity_scan(const QuantizationScenario& sc, const PhaseFunction& f, const Vec& hbars,
                                     const HarnessOptions& opt) {
  ContinuityScan s;
  Vec hs = hbars;
  std::sort(hs.begin(), hs.end(), std::greater<double>());
  s.sup = sup_norm(sc, f);
  s.hbar = hs;
  s.seminorm.assign(hs.size(), 0.0);
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= hs.size()) return;
      try {
        s.seminorm[i] = seminorm(sc, f, hs[i], opt.norm);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  int T = std::max(1, std::min<int>(opt.threads, static_cast<int>(hs.size())));
  if (T == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < T; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
  s.hbar.push_back(0.0);
  s.seminorm.push_back(s.sup);
  for (double v : s.seminorm) s.deviation.push_back(std::fabs(v - s.sup));
  s.decreasing = true;
  for (size_t i = 1; i + 1 < s.deviation.size(); ++i)
    if (!(s.deviation[i] < s.deviation[i - 1])) s.decreasing = false;
  return s;
}

cplx extrapolate_to_zero(const Vec& x, const CVec& y) {
  // Neville's scheme evaluated at 0.
  const size_t n = x.size();
  CVec p = y;
  for (size_t m = 1; m < n; ++m)
    for (size_t i = 0; i + m < n; ++i) p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
  return p[0];
}

DerivativeCheck commutator_derivative_check(const QuantizationScenario& sc, const PhaseFunction& f,
                                            const PhaseFunction& g, const Vec& hbars,
                                            const std::vector<ChartPoint>& points) {
  DerivativeCheck dc;
  Vec hs = hbars;
  std::sort(hs.begin(), hs.end(), std::greater<double>());
  dc.hbar = hs;
  if (hs.size() < 2) throw Error(ErrorCode::domain, "Richardson extrapolation needs at least two hbar values");
  if (sc.model.kind == ModelKind::exp_nilpotent_group && sc.model.is_abelian()) {
    // Commutative convolution: the scaled commutator and the bracket both vanish.
    for (double h : hs) {
      AlgebraElement Qf = weyl_quantize(sc, f, h), Qg = weyl_quantize(sc, g, h);
      AlgebraElement c = linear_combination(1.0, convolve(Qf, Qg), -1.0, convolve(Qg, Qf));
      double m = 0;
      for (const auto& v : c.samples.values) m = std::max(m, std::abs(v) / h);
      dc.raw_deviation.push_back(m);
    }
    dc.deviation = dc.raw_deviation.back();
    return dc;
  }
  std::vector<SymbolSamples> S;
  for (double h : hs) S.push_back(commutator_pullback(sc, f, g, h, points));
  PhaseFunction br = poisson_bracket_dual(sc.sf, f, g, sc.sign);
  dc.expected = sample_symbol(sc, br, S.front());
  for (auto& v : dc.expected.values) v *= cplx(0, 1);
  for (const auto& s : S) {
    double m = 0;
    for (size_t i = 0; i < s.values.size(); ++i) m = std::max(m, std::abs(s.values[i] - dc.expected.values[i]));
    dc.raw_deviation.push_back(m);
  }
  dc.extrapolated = S.front();
  Vec x;
  for (double h : hs) x.push_back(h * h);
  CVec y(hs.size());
  double dev = 0;
  for (size_t i = 0; i < dc.extrapolated.values.size(); ++i) {
    for (size_t k = 0; k < hs.size(); ++k) y[k] = S[k].values[i];
    dc.extrapolated.values[i] = extrapolate_to_zero(x, y);
    dev = std::max(dev, std::abs(dc.extrapolated.values[i] - dc.expected.values[i]));
  }
  dc.deviation = dev;
  if (!std::isfinite(dev) || dev > 10 * dc.raw_deviation.back() + 1e-12) {
    std::ostringstream os;
    os << "Richardson extrapolation diverged; raw deviations:";
    for (double r : dc.raw_deviation) os << ' ' << r;
    throw Error(ErrorCode::convergence, os.str());
  }
  return dc;
}

}  // namespace sdq
