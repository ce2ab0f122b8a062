// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <cmath>

namespace oracle {

double Gaussian2::operator()(double q, double p) const {
  double a = (q - q0) / sq, b = (p - p0) / sp;
  return amp * std::exp(-0.5 * (a * a + b * b));
}

cplx moyal_gaussian(const Gaussian2& f, const Gaussian2& g, double hbar, double q, double p) {
  // Exponent in w = (q1, p1, q2, p2):  -1/2 w^T M w + J^T w + c0.
  Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
  M(0, 0) = 1 / (f.sq * f.sq);
  M(1, 1) = 1 / (f.sp * f.sp);
  M(2, 2) = 1 / (g.sq * g.sq);
  M(3, 3) = 1 / (g.sp * g.sp);
  // (2i/hbar)(q1 p2 - p1 q2) = 1/2 w^T B w with B symmetric
  const cplx k(0, 2 / hbar);
  M(0, 3) -= k;
  M(3, 0) -= k;
  M(1, 2) += k;
  M(2, 1) += k;
  Eigen::Vector4cd J;
  J << -(q - f.q0) / (f.sq * f.sq), -(p - f.p0) / (f.sp * f.sp), -(q - g.q0) / (g.sq * g.sq),
      -(p - g.p0) / (g.sp * g.sp);
  double c0 = std::log(f(q, p)) + std::log(g(q, p));
  // Eigenvalues of M have positive real part, so the principal roots give the continuous branch.
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(M, false);
  cplx sqrt_det = 1;
  for (int i = 0; i < 4; ++i) sqrt_det *= std::sqrt(es.eigenvalues()(i));
  cplx quad = 0.5 * J.dot(M.partialPivLu().solve(J));  // J^T M^-1 J (dot conjugates the first argument)
  const double pi = std::acos(-1.0);
  double pref = (2 * pi) * (2 * pi) / (pi * hbar * pi * hbar);
  return pref / sqrt_det * std::exp(quad + c0);
}

double dense_weighted_norm(const Eigen::MatrixXcd& A, const std::vector<double>& w) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXcd S = A;
  for (Eigen::Index i = 0; i < n; ++i) {
    S.row(i) *= std::sqrt(w[i]);
    S.col(i) *= std::sqrt(w[i]);
  }
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(S).singularValues()(0);
}

cplx simpson_forward(const std::function<cplx(double)>& f, double theta, double a, int n) {
  const double h = 2 * a / n;
  cplx s = 0;
  for (int k = 0; k <= n; ++k) {
    double x = -a + k * h;
    double c = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
    s += c * f(x) * std::exp(cplx(0, -theta * x));
  }
  return s * h / 3.0;
}

Eigen::MatrixXcd weighted_product(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, const std::vector<double>& w) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) C(i, j) += A(i, k) * w[k] * B(k, j);
  return C;
}

std::vector<double> heisenberg_product(const std::vector<double>& x, const std::vector<double>& y) {
  auto expm = [](const std::vector<double>& v) {
    Eigen::Matrix3d X = Eigen::Matrix3d::Zero();
    X(0, 1) = v[0];
    X(1, 2) = v[1];
    X(0, 2) = v[2];
    return Eigen::Matrix3d(Eigen::Matrix3d::Identity() + X + 0.5 * X * X);
  };
  Eigen::Matrix3d N = expm(x) * expm(y) - Eigen::Matrix3d::Identity();
  Eigen::Matrix3d L = N - 0.5 * N * N;
  return {L(0, 1), L(1, 2), L(0, 2)};
}

}  // namespace oracle
