// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "sdq/groupoid.hpp"

using namespace sdq;

namespace {

Eigen::MatrixXcd random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = cplx(nd(rng), nd(rng));
  return M;
}

Vec weights16() {
  return {1, 0.5, 2, 1.5, 0.75, 1, 1.25, 3, 0.25, 1, 2.5, 0.8, 1.1, 0.9, 1.6, 0.6};
}

AlgebraElement heisenberg_lattice_element(std::mt19937_64& rng) {
  AlgebraElement e;
  e.model = ModelKind::exp_nilpotent_group;
  e.rep = RepKind::group_samples;
  e.c = GroupoidModel::heisenberg_group().c;
  e.samples = GroupSamples::zeros({7, 7, 7}, {1.0, 1.0, 0.5});
  std::normal_distribution<double> nd;
  Vec x(3);
  for (size_t i = 0; i < e.samples.size(); ++i) {
    e.samples.point(i, x.data());
    if (std::fabs(x[0]) <= 1 && std::fabs(x[1]) <= 1 && std::fabs(x[2]) <= 0.5)
      e.samples.values[i] = cplx(nd(rng), nd(rng));
  }
  return e;
}

}  // namespace

TEST_CASE("groupoid axioms hold for every model") {
  for (const auto& m : {GroupoidModel::finite_pair(16, weights16()), GroupoidModel::grid_pair(-8, 8),
                        GroupoidModel::abelian_group(2), GroupoidModel::heisenberg_group(),
                        GroupoidModel::rotation_action({0.5, 0.8}, {0.0, 0.5})}) {
    CAPTURE(model_kind_name(m.kind));
    GroupoidAxiomReport r = check_groupoid_axioms(m, 11, 200, 1e-12);
    CHECK(r.pass);
  }
}

TEST_CASE("Heisenberg group law agrees with the matrix realisation") {
  GroupoidModel h = GroupoidModel::heisenberg_group();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int t = 0; t < 50; ++t) {
    Vec x{U(rng), U(rng), U(rng)}, y{U(rng), U(rng), U(rng)};
    Vec z = h.group_mul(x, y);
    std::vector<double> ref = oracle::heisenberg_product(x, y);
    for (int i = 0; i < 3; ++i) CHECK(z[i] == doctest::Approx(ref[i]).epsilon(1e-13));
  }
}

TEST_CASE("finite pair: convolution is the weighted matrix product") {
  std::mt19937_64 rng(20240917);
  Vec w = weights16();
  Eigen::MatrixXcd A = random_matrix(16, rng), B = random_matrix(16, rng);
  AlgebraElement a = make_kernel_element(ModelKind::finite_pair, BandedKernel::from_dense(A, w));
  AlgebraElement b = make_kernel_element(ModelKind::finite_pair, BandedKernel::from_dense(B, w));
  Eigen::MatrixXcd got = convolve(a, b).kernel.to_dense();
  CHECK((got - oracle::weighted_product(A, B, w)).cwiseAbs().maxCoeff() <= 1e-14 * 16);
  CHECK((involute(a).kernel.to_dense() - A.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("finite pair: C*-identity and norm against dense SVD") {
  std::mt19937_64 rng(99);
  Vec w = weights16();
  for (int t = 0; t < 5; ++t) {
    Eigen::MatrixXcd A = random_matrix(16, rng);
    AlgebraElement a = make_kernel_element(ModelKind::finite_pair, BandedKernel::from_dense(A, w));
    double na = reduced_norm(a).value;
    double nsa = reduced_norm(convolve(involute(a), a)).value;
    CHECK(std::fabs(nsa - na * na) <= 1e-8 * na * na);
    double ref = oracle::dense_weighted_norm(A, w);
    CHECK(std::fabs(na - ref) <= 1e-8 * ref);
  }
}

TEST_CASE("involution is a conjugate-linear antihomomorphism") {
  std::mt19937_64 rng(4);
  Vec w = weights16();
  AlgebraElement a = make_kernel_element(ModelKind::finite_pair, BandedKernel::from_dense(random_matrix(16, rng), w));
  AlgebraElement b = make_kernel_element(ModelKind::finite_pair, BandedKernel::from_dense(random_matrix(16, rng), w));
  CHECK(element_distance(involute(convolve(a, b)), convolve(involute(b), involute(a))) <= 1e-12);
  cplx z(0.3, -1.2);
  CHECK(element_distance(involute(linear_combination(z, a, 1.0, b)),
                         linear_combination(std::conj(z), involute(a), 1.0, involute(b))) <= 1e-12);
  CHECK(element_distance(involute(involute(a)), a) == 0.0);

  AlgebraElement f = heisenberg_lattice_element(rng), g = heisenberg_lattice_element(rng);
  CHECK(element_distance(involute(convolve(f, g)), convolve(involute(g), involute(f))) <= 1e-12);
}

TEST_CASE("Heisenberg lattice convolution is not commutative, abelian is") {
  std::mt19937_64 rng(8);
  AlgebraElement f = heisenberg_lattice_element(rng), g = heisenberg_lattice_element(rng);
  CHECK(element_distance(convolve(f, g), convolve(g, f)) > 1e-3);
  AlgebraElement fa = f, ga = g;
  fa.c = ga.c = GroupoidModel::abelian_group(3).c;
  CHECK(element_distance(convolve(fa, ga), convolve(ga, fa)) <= 1e-12);
}

TEST_CASE("periodic banded kernels agree with dense circulant algebra") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  const int n = 12;
  Vec w(n, 0.3);
  BandedKernel A = BandedKernel::zeros(n, -2, 3, w, true), B = BandedKernel::zeros(n, -1, 1, w, true);
  for (auto& v : A.data) v = cplx(nd(rng), nd(rng));
  for (auto& v : B.data) v = cplx(nd(rng), nd(rng));
  Eigen::MatrixXcd Ad = A.to_dense(), Bd = B.to_dense();
  CHECK(Ad(0, n - 2) == A.data[0]);  // wraps to column n-2 from row 0 at offset -2
  Eigen::MatrixXcd W = Eigen::VectorXd::Constant(n, 0.3).cast<cplx>().asDiagonal();
  CHECK((compose(A, B).to_dense() - Ad * W * Bd).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((axpby(2.0, A, cplx(0, 1), B).to_dense() - (2.0 * Ad + cplx(0, 1) * Bd)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((A.adjoint().to_dense() - Ad.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  double ref = oracle::dense_weighted_norm(Ad, w);
  CHECK(operator_norm(A).value == doctest::Approx(ref).epsilon(1e-8));
  CHECK(A.schur_bound() >= ref * (1 - 1e-12));
  BandedKernel C = BandedKernel::zeros(n, -1, 1, w, false);
  CHECK_THROWS_AS(compose(A, C), Error);
}

TEST_CASE("power iteration reports non-convergence at the cap") {
  std::mt19937_64 rng(3);
  const int n = 64;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) A(i, i) = 1.0 - 1e-6 * i;
  A(0, 1) = 1e-3;
  NormOptions opt;
  opt.max_iter = 20;
  opt.dense_fallback_max = 0;
  CHECK_THROWS_AS(operator_norm(BandedKernel::from_dense(A, Vec(n, 1.0)), opt), ConvergenceError);
  opt.max_iter = 10000;
  opt.dense_fallback_max = 2048;
  NormResult r = operator_norm(BandedKernel::from_dense(A, Vec(n, 1.0)), opt);
  CHECK(r.value == doctest::Approx(oracle::dense_weighted_norm(A, Vec(n, 1.0))).epsilon(1e-9));
}

TEST_CASE("kernel binary export round-trips bit for bit") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXcd A = random_matrix(7, rng);
  std::string path = (std::filesystem::temp_directory_path() / "sdq_kernel_rt.bin").string();
  write_kernel_binary(path, A);
  Eigen::MatrixXcd B = read_kernel_binary(path);
  std::remove(path.c_str());
  REQUIRE(B.rows() == 7);
  CHECK((A - B).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(read_kernel_binary("/nonexistent/kernel.bin"), Error);
}

TEST_CASE("exponential maps") {
  GroupoidModel g = GroupoidModel::grid_pair(-8, 8);
  ExpPair e = exp_maps(g, {1.0}, {0.5});
  CHECK(e.left == Vec{0.5, 1.5});
  CHECK(e.weyl == Vec{0.0, 1.0});
  CHECK_THROWS_AS(exp_maps(g, {2.0}, {7.5}), Error);
  CHECK_THROWS_AS(exp_maps(GroupoidModel::finite_pair(4), {1.0}, {0.0}), Error);
  GroupoidModel r = GroupoidModel::rotation_action({1.0}, {0.0});
  ExpPair er = exp_maps(r, {0.4}, {1.0, 0.0});
  CHECK(std::hypot(er.weyl[1], er.weyl[2]) == doctest::Approx(1.0));
}

TEST_CASE("BCH extraction recovers the structure") {
  GroupoidModel h = GroupoidModel::heisenberg_group();
  BchResult bh = bch_extract(parametrization_for(h), Vec{}, 1e-4);
  CHECK(std::fabs(bh.c(0, 1, 2) - 1.0) <= 1e-4);
  CHECK(std::fabs(bh.c(1, 0, 2) + 1.0) <= 1e-4);
  GroupoidModel g = GroupoidModel::grid_pair(-8, 8);
  for (double u : {-3.0, 0.0, 2.5}) {
    BchResult bg = bch_extract(parametrization_for(g), Vec{u}, 1e-4);
    CHECK(std::fabs(bg.a[0] - 1.0) <= 1e-6);
    CHECK(std::fabs(bg.c(0, 0, 0)) <= 1e-6);
  }
  ChartDomain chart = ChartDomain::uniform(1, 1, {-2.0}, {2.0}, 3);
  StructureFunctions sf = structure_from_parametrization(parametrization_for(g), chart, 1e-4);
  CHECK(check_axioms(sf, 1e-5).pass);
  CHECK(check_parametrization(parametrization_for(h), {Vec{}}, 3) <= 1e-12);
}
