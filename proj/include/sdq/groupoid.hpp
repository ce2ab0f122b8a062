// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sdq/algebroid.hpp"
#include "sdq/banded.hpp"
#include "sdq/common.hpp"

namespace sdq {

enum class ModelKind { finite_pair, grid_pair, exp_nilpotent_group, transformation };

const char* model_kind_name(ModelKind k);

// Arrows are flat coordinate vectors:
//   finite-pair / grid-pair: (r, s)
//   exp-nilpotent-group:     exponential coordinates of the element
//   transformation:          (x, m_1, m_2) with x in the acting group, r = m, s = x^{-1} m
struct GroupoidModel {
  ModelKind kind = ModelKind::finite_pair;
  // finite-pair
  int units = 0;
  Vec unit_weights;  // empty: all ones
  // grid-pair (one-dimensional base)
  double base_lo = -8, base_hi = 8;
  // exp-nilpotent-group (also the acting group of a transformation groupoid)
  int dim = 0;
  Tensor3 c;  // structure constants [e_i, e_j] = sum_k c_ijk e_k
  // transformation: rotation of the plane by the additive group R, x.m = R(-x) m
  std::string action = "rotation";
  Vec radii;
  Vec bloch_phases;
  // representation-picture numerics for non-abelian groups
  double lambda_min = 1.0;
  double theta2_extent = 8.0;

  static GroupoidModel finite_pair(int n, Vec weights = {});
  static GroupoidModel grid_pair(double lo, double hi);
  static GroupoidModel abelian_group(int m);
  static GroupoidModel heisenberg_group();
  static GroupoidModel rotation_action(Vec radii, Vec bloch_phases);

  void validate() const;
  bool is_abelian() const;
  int fiber_dim() const;  // rank of the algebroid
  int base_dim() const;   // dimension of the unit space used as chart
  int arrow_dim() const;

  Vec range(const Vec& g) const;
  Vec source(const Vec& g) const;
  Vec compose(const Vec& g, const Vec& h) const;  // requires source(g) == range(h)
  Vec inverse(const Vec& g) const;
  Vec unit(const Vec& u) const;
  // Group law in exponential coordinates (step <= 2): x y = x + y + [x, y] / 2.
  Vec group_mul(const Vec& x, const Vec& y) const;
  // Action of the acting group on the base (transformation kind).
  Vec act(double x, const Vec& m) const;
  Vec random_arrow(std::mt19937_64& rng, const Vec* with_source = nullptr) const;
  Vec random_unit(std::mt19937_64& rng) const;
};

struct GroupoidAxiomReport {
  double associativity = 0;
  double inverse = 0;
  double source_range = 0;
  bool pass = false;
};
GroupoidAxiomReport check_groupoid_axioms(const GroupoidModel& m, std::uint64_t seed, int trials, double tol);

// Function samples on a uniform lattice in exponential coordinates.
struct GroupSamples {
  int m = 0;
  std::vector<int> count;  // points per axis (odd, symmetric about 0)
  Vec h;                   // spacing per axis
  CVec values;             // axis 0 fastest

  size_t size() const { return values.size(); }
  void point(size_t idx, double* x) const;
  // Lattice lookup; 0 off the grid support, error if x is not a lattice point.
  cplx at(const double* x) const;
  double cell_volume() const;
  static GroupSamples zeros(std::vector<int> count, Vec h);
};

struct Slice {
  Vec label;
  BandedKernel K;
};

enum class RepKind { kernel, group_samples, slices };

// Element of the convolution algebra at a fixed hbar (0 allowed).
struct AlgebraElement {
  ModelKind model = ModelKind::finite_pair;
  RepKind rep = RepKind::kernel;
  double hbar = 0;
  BandedKernel kernel;
  GroupSamples samples;
  std::vector<Slice> slices;
  Tensor3 c;  // group law for group_samples

  void validate() const;
};

AlgebraElement make_kernel_element(ModelKind model, BandedKernel K, double hbar = 0);

AlgebraElement convolve(const AlgebraElement& f, const AlgebraElement& g);
AlgebraElement involute(const AlgebraElement& f);
AlgebraElement linear_combination(cplx a, const AlgebraElement& f, cplx b, const AlgebraElement& g);
// Pointwise/entrywise sup distance between two elements of the same shape.
double element_distance(const AlgebraElement& f, const AlgebraElement& g);
// Entry-wise max |f - f*|.
double self_adjointness_defect(const AlgebraElement& f);
// Group convolution evaluated at one lattice point.
cplx convolve_at(const AlgebraElement& f, const AlgebraElement& g, const double* x);

NormResult reduced_norm(const AlgebraElement& f, const NormOptions& opt = {});

struct ExpPair {
  Vec left;
  Vec weyl;
};
// X is a fiber vector of the algebroid at the unit u.
ExpPair exp_maps(const GroupoidModel& m, const Vec& X, const Vec& u);
// Matrix realisation of a Heisenberg element given in exponential coordinates.
Eigen::Matrix3d heisenberg_matrix(const Vec& x);

struct LocalParametrization {
  int n = 0, p = 0;
  std::function<Vec(const Vec& u, const Vec& v)> sigma;
  std::function<Vec(const Vec& u, const Vec& v, const Vec& w)> pmap;
};
LocalParametrization parametrization_for(const GroupoidModel& m);
double check_parametrization(const LocalParametrization& par, const std::vector<Vec>& base, std::uint64_t seed);

struct BchResult {
  Tensor3 B;  // B(i, j, k) = B_k(f_i, f_j)
  Vec a;      // p x n row-major
  Tensor3 c;
};
BchResult bch_extract(const LocalParametrization& par, const Vec& u, double h_fd);
// Structure functions assembled from bch_extract at each evaluation point.
StructureFunctions structure_from_parametrization(const LocalParametrization& par, const ChartDomain& chart, double h_fd);

}  // namespace sdq
