// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sdq/common.hpp"

namespace sdq {

struct Box {
  Vec lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const double* u, double slack = 1e-12) const;
};

struct ChartDomain {
  int n = 0;  // base dimension; 0 means a one-point base
  int p = 1;  // fiber dimension
  Box box;
  std::vector<Vec> samples;

  void validate() const;
  // Uniform sample grid with `per_axis` points per base axis (one empty point when n = 0).
  static ChartDomain uniform(int n, int p, Vec lo, Vec hi, int per_axis);
};

// Dense p*p*p tensor, index (i,j,k) -> (i*p + j)*p + k.
struct Tensor3 {
  int p = 0;
  Vec v;
  Tensor3() = default;
  explicit Tensor3(int p_) : p(p_), v(static_cast<size_t>(p_) * p_ * p_, 0.0) {}
  double& operator()(int i, int j, int k) { return v[(static_cast<size_t>(i) * p + j) * p + k]; }
  double operator()(int i, int j, int k) const { return v[(static_cast<size_t>(i) * p + j) * p + k]; }
};

enum class DerivativeMode { analytic, finite_difference };
enum class SignConvention { standard, weyl };

const char* sign_name(SignConvention s);

struct StructureFunctions {
  std::string name;
  ChartDomain chart;
  // a(u): p x n row-major.  c(u): Tensor3.
  std::function<Vec(const double* u)> a;
  std::function<Tensor3(const double* u)> c;
  // Optional analytic u-derivatives: entry l is d/du_l.
  std::function<std::vector<Vec>(const double* u)> da;
  std::function<std::vector<Tensor3>(const double* u)> dc;
  DerivativeMode mode = DerivativeMode::analytic;
  double h_fd = 1e-5;

  int n() const { return chart.n; }
  int p() const { return chart.p; }
  Vec a_at(const double* u) const;
  Tensor3 c_at(const double* u) const;
  std::vector<Vec> da_at(const double* u) const;
  std::vector<Tensor3> dc_at(const double* u) const;
  void check_domain(const double* u) const;
};

// Built-in algebroids.
StructureFunctions sf_abelian(int n, int p, const Box& box);
StructureFunctions sf_tangent(int n, const Box& box);
StructureFunctions sf_heisenberg();
StructureFunctions sf_action_rotation(const Box& box);
// Constant coefficients; c entries are completed antisymmetrically in (i,j).
struct CEntry {
  int i, j, k;
  double value;
};
StructureFunctions sf_constant(int n, int p, const Box& box, const Vec& a_rowmajor, const std::vector<CEntry>& c_entries);

struct ScalarField {
  std::function<double(const double* u)> value;
  std::function<Vec(const double* u)> grad;  // optional
  double operator()(const double* u) const { return value(u); }
  Vec gradient(const double* u, int n, double h_fd) const;
};

struct Section {
  std::function<Vec(const double* u)> X;
  std::function<Vec(const double* u)> jac;  // optional p x n row-major, dX_i/du_l
  Vec operator()(const double* u) const { return X(u); }
  Vec jacobian(const double* u, int n, int p, double h_fd) const;
};

Section frame_section(int p, int i);

ScalarField anchor_apply(const StructureFunctions& sf, const Section& X, const ScalarField& h);
Section bracket_sections(const StructureFunctions& sf, const Section& X, const Section& Y);

struct AxiomReport {
  double jacobi_residual = 0;
  double anchor_residual = 0;
  double tol = 0;
  bool pass = false;
};
AxiomReport check_axioms(const StructureFunctions& sf, double tol);

// Observable on the dual bundle: (u, eps) -> complex.
struct PhaseFunction {
  int n = 0, p = 1;
  std::function<cplx(const double* u, const double* e)> f;
  // Optional analytic gradient; fills n + p entries (u first, then eps).
  std::function<void(const double* u, const double* e, cplx* g)> grad;
  double band_limit = -1.0;  // < 0: not declared band-limited
  bool real_valued = false;
  double h_fd = 1e-5;
  std::string label;

  cplx operator()(const double* u, const double* e) const { return f(u, e); }
  void gradient(const double* u, const double* e, cplx* g) const;
};

PhaseFunction poisson_bracket_dual(const StructureFunctions& sf, const PhaseFunction& phi, const PhaseFunction& psi,
                                   SignConvention sign = SignConvention::standard);

// Pointwise algebra of phase functions (gradients by the product rule).
PhaseFunction pf_product(const PhaseFunction& a, const PhaseFunction& b);
PhaseFunction pf_linear(cplx alpha, const PhaseFunction& a, cplx beta, const PhaseFunction& b);
PhaseFunction pf_conj(const PhaseFunction& a);
PhaseFunction pf_zero(int n, int p);

}  // namespace sdq
