#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "klexpand/error.hpp"
#include "klexpand/reference.hpp"
#include "oracles.hpp"

using namespace klexpand;
using doctest::Approx;

TEST_CASE("constant kernel on the unit interval is rank one") {
  const auto g = unit_interval();
  const auto trial = make_trial_space(g, 2, std::vector<int>{5});
  const auto sys = assemble_galerkin_dense(trial, g, {KernelKind::constant, 1.0, 1.0}, 4);
  // z_j = ∫ N_j, from the exact univariate mass matrix: Σ_i M_ij = ∫ N_j.
  const Eigen::MatrixXd mass = to_eigen(univariate_mass(trial.direction(0), trial.direction(0)));
  const Eigen::VectorXd z = mass.colwise().sum().transpose();
  CHECK(oracle::rel_diff(sys.a, z * z.transpose()) <= 1e-13);
  const auto res = solve_dense_generalized(sys, 2);
  CHECK(res.eigenvalues[0] == Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(res.eigenvalues[1]) <= 1e-12);

  const auto col = assemble_collocation_dense(trial, g, {KernelKind::constant, 1.0, 1.0}, 4);
  for (Eigen::Index i = 0; i < col.a.rows(); ++i) CHECK((col.a.row(i) - z.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(solve_dense_generalized(col, 1).eigenvalues[0] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dense Galerkin matrices are symmetric") {
  const auto g = unit_interval();
  const auto trial = make_trial_space(g, 1, std::vector<int>{2});
  const auto sys = assemble_galerkin_dense(trial, g, {KernelKind::gaussian, 1.0, 0.5}, 3);
  CHECK((sys.a - sys.a.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  const auto annulus = fixture::quarter_annulus();
  const auto t2 = make_trial_space(annulus, 2, std::vector<int>{2, 2});
  const auto s2 = assemble_galerkin_dense(t2, annulus, {KernelKind::exponential, 1.0, 0.5}, 3);
  CHECK((s2.z - s2.z.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * s2.z.cwiseAbs().maxCoeff());
  Eigen::LLT<Eigen::MatrixXd> llt(s2.z);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("mass matrix equals the Kronecker product of univariate masses on a box") {
  const std::vector<double> ext{1.0, 1.0};
  const auto g = box_geometry(ext);
  const auto trial = make_trial_space(g, 2, std::vector<int>{3, 2});
  const auto sys = assemble_galerkin_dense(trial, g, {KernelKind::gaussian, 1.0, 0.5}, 3);
  std::vector<BandedMatrix> f;
  for (int k = 0; k < 2; ++k) f.push_back(univariate_mass(trial.direction(k), trial.direction(k)));
  CHECK(oracle::rel_diff(sys.z, dense_kronecker(f)) <= 1e-13);
}

TEST_CASE("p=1 collocation matrix on the identity geometry is the identity") {
  const auto g = unit_square();
  const auto trial = make_trial_space(g, 1, std::vector<int>{3, 2});
  const auto sys = assemble_collocation_dense(trial, g, {KernelKind::gaussian, 1.0, 0.5}, 2);
  CHECK((sys.z - Eigen::MatrixXd::Identity(sys.z.rows(), sys.z.cols())).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("identity pencil") {
  DenseSystem sys;
  sys.z = Eigen::MatrixXd::Identity(5, 5);
  sys.z(1, 0) = sys.z(0, 1) = 0.3;
  sys.a = sys.z;
  for (auto method : {DenseMethod::galerkin_gauss, DenseMethod::collocation}) {
    sys.method = method;
    const auto res = solve_dense_generalized(sys, 5);
    for (double l : res.eigenvalues) CHECK(l == Approx(1.0).epsilon(1e-12));
  }
  sys.z = Eigen::MatrixXd::Zero(5, 5);
  sys.method = DenseMethod::galerkin_gauss;
  CHECK_THROWS_AS(solve_dense_generalized(sys, 2), FactorizationError);
}

TEST_CASE("exponential kernel on the unit interval matches the analytic eigenvalues") {
  const auto g = unit_interval();
  const auto trial = make_trial_space(g, 2, std::vector<int>{64});
  const auto sys = assemble_galerkin_dense(trial, g, {KernelKind::exponential, 1.0, 1.0}, 6);
  const auto res = solve_dense_generalized(sys, 5);
  const auto exact = oracle::exponential_eigenvalues(5, 1.0);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(res.eigenvalues[i] - exact[i]) / exact[i] <= 1e-4);
}

TEST_CASE("eigenvalue sum is bounded by the trace and approaches it") {
  const auto g = fixture::quarter_annulus();
  const double trace = 1.3 * std::numbers::pi * 3.0 / 4.0;
  double previous = 0.0;
  for (int e : {2, 4}) {
    const auto trial = make_trial_space(g, 2, std::vector<int>{e, e});
    const auto sys = assemble_galerkin_dense(trial, g, {KernelKind::exponential, 1.3, 0.5}, 4);
    const auto res = solve_dense_generalized(sys, static_cast<std::size_t>(trial.size()));
    const double sum = std::accumulate(res.eigenvalues.begin(), res.eigenvalues.end(), 0.0);
    CHECK(sum <= trace + 1e-8);
    CHECK(sum > previous);
    CHECK(res.eigenvalues.back() >= -1e-10);
    for (std::size_t i = 0; i + 1 < res.size(); ++i) CHECK(res.eigenvalues[i] >= res.eigenvalues[i + 1]);
    previous = sum;
  }
}

TEST_CASE("size limits") {
  const auto g = unit_square();
  const auto trial = make_trial_space(g, 2, std::vector<int>{50, 50});
  CHECK_THROWS_AS(assemble_galerkin_dense(trial, g, {KernelKind::gaussian, 1.0, 0.5}, 3), SizeError);
  CHECK_THROWS_AS(assemble_collocation_dense(trial, g, {KernelKind::gaussian, 1.0, 0.5}, 3), SizeError);
}
