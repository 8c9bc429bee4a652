#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "klexpand/eigensolver.hpp"
#include "klexpand/error.hpp"

using namespace klexpand;
using doctest::Approx;

namespace {

MatVec dense_op(const Eigen::MatrixXd& a) {
  return [a](std::span<const double> v, std::span<double> out) {
    const Eigen::Map<const Eigen::VectorXd> vm(v.data(), static_cast<Eigen::Index>(v.size()));
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = a * vm;
  };
}

Eigen::MatrixXd random_matrix(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m(i, j) = nd(rng);
  }
  return m;
}

// ‖A v − λ v‖ recomputed outside the solver.
double residual(const Eigen::MatrixXd& a, const std::vector<double>& v, double lambda) {
  const Eigen::Map<const Eigen::VectorXd> vm(v.data(), static_cast<Eigen::Index>(v.size()));
  return (a * vm - lambda * vm).norm();
}

}  // namespace

TEST_CASE("diagonal operator") {
  const Eigen::MatrixXd a = Eigen::Vector3d(3, 2, 1).asDiagonal();
  for (const auto& res : {solve_symmetric(dense_op(a), 3, 2), solve_nonsymmetric(dense_op(a), 3, 2)}) {
    REQUIRE(res.size() == 2);
    CHECK(res.eigenvalues[0] == Approx(3.0).epsilon(1e-12));
    CHECK(res.eigenvalues[1] == Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(res.any_complex());
    CHECK(res.converged);
  }
}

TEST_CASE("random symmetric matrix against a dense eigendecomposition") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const Eigen::MatrixXd r = random_matrix(20, seed);
    const Eigen::MatrixXd a = 0.5 * (r + r.transpose());
    const auto res = solve_symmetric(dense_op(a), 20, 5, {.tol = 1e-12});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    for (int i = 0; i < 5; ++i) {
      const double expected = es.eigenvalues()(19 - i);
      CHECK(std::abs(res.eigenvalues[static_cast<std::size_t>(i)] - expected) <= 1e-9);
    }
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(residual(a, res.eigenvectors[i], res.eigenvalues[i]) <= 1e-10 * scale);
      CHECK(res.residuals[i] <= 1e-10 * scale);
      for (std::size_t j = 0; j < 5; ++j) {
        const Eigen::Map<const Eigen::VectorXd> vi(res.eigenvectors[i].data(), 20);
        const Eigen::Map<const Eigen::VectorXd> vj(res.eigenvectors[j].data(), 20);
        CHECK(std::abs(vi.dot(vj) - (i == j ? 1.0 : 0.0)) <= 1e-10);
      }
    }
    const auto ns = solve_nonsymmetric(dense_op(a), 20, 5, {.tol = 1e-12});
    // Largest algebraic versus largest real part coincide for a real spectrum.
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(ns.eigenvalues[i] - res.eigenvalues[i]) <= 1e-9);
  }
}

TEST_CASE("nonsymmetric matrix with a constructed real spectrum") {
  const int n = 20;
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = 10.0 / (1.0 + i);
  const Eigen::MatrixXd v = random_matrix(n, 7) + 5.0 * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a = v * d.asDiagonal() * v.inverse();
  const auto res = solve_nonsymmetric(dense_op(a), n, 6, {.tol = 1e-12});
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(res.eigenvalues[static_cast<std::size_t>(i)] - d(i)) <= 1e-8);
    CHECK(std::abs(res.imag_parts[static_cast<std::size_t>(i)]) <= 1e-8);
    CHECK_FALSE(res.complex_flags[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("complex pairs are flagged") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
  a(0, 0) = 3.0;
  a(0, 1) = -2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 3.0;
  for (int i = 2; i < 6; ++i) a(i, i) = 1.0 / i;
  const auto res = solve_nonsymmetric(dense_op(a), 6, 2, {.tol = 1e-12});
  CHECK(res.any_complex());
  CHECK(res.eigenvalues[0] == Approx(3.0));
  CHECK(std::abs(res.imag_parts[0]) == Approx(2.0));
  CHECK(res.complex_flags[0]);
}

TEST_CASE("seeded runs are reproducible") {
  const Eigen::MatrixXd r = random_matrix(60, 9);
  const Eigen::MatrixXd a = r * r.transpose();
  const auto first = solve_symmetric(dense_op(a), 60, 8);
  const auto second = solve_symmetric(dense_op(a), 60, 8);
  CHECK(first.eigenvalues == second.eigenvalues);
  CHECK(first.iterations == second.iterations);
  CHECK(seeded_start_vector(10, 4) == seeded_start_vector(10, 4));
  CHECK(seeded_start_vector(10, 4) != seeded_start_vector(10, 5));
}

TEST_CASE("rank-one constant-kernel operator") {
  const auto sq = unit_square();
  const std::vector<int> el{3, 3};
  const auto s = fixture::galerkin(sq, {KernelKind::constant, 1.0, 1.0}, 2, el);
  const auto res = fixture::solve(s, 3);
  CHECK(std::abs(res.eigenvalues[0] - 1.0) <= 1e-9);
  CHECK(std::abs(res.eigenvalues[1]) <= 1e-9);
  CHECK(std::abs(res.eigenvalues[2]) <= 1e-9);
}

TEST_CASE("eigensolver errors") {
  const Eigen::MatrixXd nonsym = random_matrix(12, 11);
  CHECK_THROWS_AS(solve_symmetric(dense_op(nonsym), 12, 2), OperatorContractError);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  CHECK_THROWS_AS(solve_symmetric(dense_op(a), 4, 5), ParameterError);
  CHECK_THROWS_AS(solve_symmetric(dense_op(a), 4, 0), ParameterError);
  CHECK_THROWS_AS(solve_symmetric(dense_op(a), 4, 1, {.tol = 0.0}), ParameterError);

  Eigen::VectorXd d(200);
  for (int i = 0; i < 200; ++i) d(i) = 1.0 - 1e-6 * i;
  const Eigen::MatrixXd clustered = d.asDiagonal();
  try {
    solve_symmetric(dense_op(clustered), 200, 10, {.tol = 1e-12, .max_iter = 30});
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.partial().size() < 10);
    CHECK_FALSE(e.partial().converged);
  }
}
