// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "sdq/algebroid.hpp"
#include "sdq/fourier.hpp"

namespace sdq {

// Parameterized observable family as declared in a scenario file.
struct ObservableSpec {
  std::string family;                 // gaussian-envelope | polynomial-times-gaussian | band-limited-bump | base-gaussian
  std::map<std::string, Vec> params;  // amp, q0, sq, e0, se, var, coeffs, radius
  bool operator==(const ObservableSpec&) const = default;
};

PhaseFunction make_observable(const ObservableSpec& spec, int n, int p, const FiberGrid& grid);

// amp * exp(-sum (q-q0)^2/(2 sq^2) - sum (e-e0)^2/(2 se^2))
PhaseFunction gaussian_envelope(int n, int p, double amp, const Vec& q0, const Vec& sq, const Vec& e0, const Vec& se);
// Gaussian in the base variables, constant along the fiber.
PhaseFunction base_gaussian(int n, int p, double amp, const Vec& q0, const Vec& sq);
// Coordinate function: index < n picks q_index, otherwise eps_{index-n}.
PhaseFunction coordinate_function(int n, int p, int index);

}  // namespace sdq
