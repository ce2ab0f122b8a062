// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdq {

using cplx = std::complex<double>;
using Vec = std::vector<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorCode {
  domain = 1,
  structural,
  aliasing,
  convergence,
  evaluation,
  config,
  out_of_neighbourhood,
  support_escape,
  unsupported,
  io,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Non-convergent power iteration keeps its last estimate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double last, double residual, int iters)
      : Error(ErrorCode::convergence, msg), last_estimate(last), last_residual(residual), iterations(iters) {}
  double last_estimate;
  double last_residual;
  int iterations;
};

// Diagnostics carried alongside results instead of thrown.
struct Warnings {
  std::vector<std::string> items;
  void add(std::string s) { items.push_back(std::move(s)); }
  bool empty() const { return items.empty(); }
};

}  // namespace sdq
