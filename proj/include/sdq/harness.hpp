// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "sdq/quantize.hpp"

namespace sdq {

// All norms below are reduced norms.
struct SweepRow {
  double hbar = 0;
  double dirac_residual = 0;
  double mult_residual = 0;
  double seminorm_f = 0;
  double seminorm_g = 0;
  double sup_norm_f = 0;
  double noise_floor = 0;  // round-off scale of the commutator term
};

struct LogLogFit {
  double slope = 0;
  double intercept = 0;
  double fit_residual = 0;  // rms of log residuals
};

struct SweepResult {
  std::string scenario;
  std::vector<SweepRow> rows;  // decreasing hbar
  LogLogFit fit;               // log dirac_residual against log hbar
};

struct HarnessOptions {
  NormOptions norm;
  int threads = 1;
};

double dirac_residual(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g, double hbar,
                      const NormOptions& opt = {});
// ||(i hbar)^{-1}(f x g - g x f) - {f, g}||_hbar
double dirac_residual_semistrict(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g,
                                 double hbar, const NormOptions& opt = {});
double mult_residual(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g, double hbar,
                     const NormOptions& opt = {});

// Every per-hbar quantity, sharing the quantized elements.
SweepRow sweep_point(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g, double hbar,
                     const NormOptions& opt = {});
SweepResult run_sweep(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g,
                      const Vec& hbars, const HarnessOptions& opt = {});

LogLogFit loglog_fit(const Vec& x, const Vec& y);

struct ContinuityScan {
  Vec hbar;       // decreasing, ends with the hbar = 0 entry
  Vec seminorm;
  Vec deviation;  // |seminorm - sup|
  double sup = 0;
  bool decreasing = false;
};
ContinuityScan field_continuity_scan(const QuantizationScenario& sc, const PhaseFunction& f, const Vec& hbars,
                                     const HarnessOptions& opt = {});

struct DerivativeCheck {
  Vec hbar;
  Vec raw_deviation;  // per-hbar sup deviation before extrapolation
  double deviation = 0;
  SymbolSamples extrapolated;
  SymbolSamples expected;
};
// Richardson extrapolation (in hbar^2) of the scaled commutator against i F^{-1}{f, g}.
DerivativeCheck commutator_derivative_check(const QuantizationScenario& sc, const PhaseFunction& f,
                                            const PhaseFunction& g, const Vec& hbars,
                                            const std::vector<ChartPoint>& points);

// Polynomial extrapolation to x = 0 through (x_i, y_i).
cplx extrapolate_to_zero(const Vec& x, const CVec& y);

}  // namespace sdq
