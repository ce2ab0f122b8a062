// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sdq/algebroid.hpp"
#include "sdq/banded.hpp"
#include "sdq/fourier.hpp"
#include "sdq/groupoid.hpp"

namespace sdq {

// Radial cutoff on the arrow fiber: 1 for r <= r_inner, 0 for r >= r_outer.
struct CutoffKappa {
  double r_inner = 4.8;
  double r_outer = 9.6;
  double operator()(double r) const { return smooth_step_down(std::fabs(r), r_inner, r_outer); }
  void validate() const;
  static CutoffKappa defaults(const FiberGrid& g) { return CutoffKappa{0.4 * g.L, 0.8 * g.L}; }
};

// Cutoff in hbar: 1 for |hbar| <= plateau, 0 beyond max.
struct HbarCutoffChi {
  double plateau = 0.4;
  double max = 0.8;
  double operator()(double hbar) const { return smooth_step_down(std::fabs(hbar), plateau, max); }
  void validate() const;
  static HbarCutoffChi from_hbar_list(const Vec& hbars);
};

struct QuantizationScenario {
  std::string name;
  GroupoidModel model;
  StructureFunctions sf;
  DensityWeight mu;
  FiberGrid grid;
  CutoffKappa kappa;
  HbarCutoffChi chi;
  SignConvention sign = SignConvention::standard;
  Vec hbar_list;
  double trim_rel = 1e-14;  // diagonals below this fraction of the peak are dropped

  // Throws on inconsistent data (including the parametrization/structure-function cross-check).
  void validate() const;
  // Largest deviation between bch_extract of the model and sf over the chart samples.
  double bch_consistency() const;
  // +1 when the quantizer pairs (x - y)/hbar with the fiber variable, -1 for the mirrored pairing.
  int orientation() const;

  // Model-matched structure functions, default kappa and chi.
  static QuantizationScenario make(std::string name, GroupoidModel model, SignConvention sign, FiberGrid grid,
                                   Vec hbar_list);
};

// One-dimensional Weyl kernel on the lattice x_i = (i + i0) * hbar * dxi, i = 0..n-1.
// symbol(m, row) fills grid.N samples sigma(m, theta_k) for the line midpoint m.
using LineSymbol = std::function<void(double m, cplx* row)>;
BandedKernel weyl_line_kernel(const FiberGrid& g, int i0, int n, double hbar, int orient, const CutoffKappa& kappa,
                              const LineSymbol& symbol, const Vec* weights = nullptr);

// Q_hbar(f).  hbar = 0 gives the multiplication operator by f on the base x dual sample grid.
AlgebraElement weyl_quantize(const QuantizationScenario& sc, const PhaseFunction& f, double hbar,
                             Warnings* warn = nullptr);

// Sample points used for the hbar = 0 fiber and for sup norms.
std::vector<Vec> sup_base_points(const QuantizationScenario& sc);
double sup_norm(const QuantizationScenario& sc, const PhaseFunction& f);

// Values of a dual-side function at chart points.  Each chart point is a line through the
// base (or a representation slice) together with the fiber values it carries.
// grid-pair: {m}; rotation: {u1, u2}; heisenberg: {lambda, m} with theta = (theta1, -lambda m, lambda).
struct ChartPoint {
  Vec base;
};

struct SymbolSamples {
  double hbar = 0;
  std::vector<ChartPoint> points;
  Vec fiber;   // theta values (dual side) or eta values (primal side)
  CVec values; // point-major: values[ip * fiber.size() + k]
  FiberSide side = FiberSide::dual;
  cplx at(size_t ip, size_t k) const { return values[ip * fiber.size() + k]; }
};

// Chart points for a model: evenly spread over the region where f or g is not negligible.
std::vector<ChartPoint> default_chart_points(const QuantizationScenario& sc, int count);

// f x_hbar g at chart points (dual side, |theta| below half the dual extent).
SymbolSamples star_product(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g,
                           double hbar, const std::vector<ChartPoint>& points);
// Primal-side pullback of (Q f * Q g - Q g * Q f) / hbar at eta in 2 dxi Z, |eta| < L.
SymbolSamples commutator_pullback(const QuantizationScenario& sc, const PhaseFunction& f, const PhaseFunction& g,
                                  double hbar, const std::vector<ChartPoint>& points);
// Closed-form evaluation on the same layout (dual side) and its inverse fiber transform (primal side).
SymbolSamples sample_symbol(const QuantizationScenario& sc, const PhaseFunction& f, const SymbolSamples& layout);

PhaseFunction deformed_involution(const PhaseFunction& f);
double seminorm(const QuantizationScenario& sc, const PhaseFunction& f, double hbar, const NormOptions& opt = {});

}  // namespace sdq
