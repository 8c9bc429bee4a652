#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "klexpand/error.hpp"
#include "klexpand/reference.hpp"
#include "oracles.hpp"

using namespace klexpand;
using doctest::Approx;

namespace {

Eigen::MatrixXd probe_galerkin(const GalerkinSetup& s) {
  return oracle::probe(s.size(), [&](const std::vector<double>& v) { return apply_galerkin(s, v); });
}

}  // namespace

TEST_CASE("jacobian weights on boxes") {
  const auto sq = unit_square();
  const std::vector<int> el{3, 4};
  const auto s = fixture::galerkin(sq, {KernelKind::gaussian, 1.0, 0.5}, 2, el);
  for (double w : s.jacobian_weights()) CHECK(w == Approx(1.0));
  const std::vector<double> ext{2.0, 3.0};
  const auto box = box_geometry(ext);
  const auto t = fixture::galerkin(box, {KernelKind::gaussian, 1.0, 0.5}, 2, el);
  for (double w : t.jacobian_weights()) CHECK(w == Approx(std::sqrt(6.0)));
  CHECK(t.interp_size() >= t.size());
}

TEST_CASE("matrix-free operator matches the dense composition") {
  struct Case {
    GeometryMap g;
    std::vector<int> elements;
    int p;
    KernelKind kind;
  };
  const std::vector<double> ext1{1.5};
  const std::vector<double> ext2{1.0, 0.7};
  std::vector<Case> cases{
      {box_geometry(ext1), {6}, 2, KernelKind::exponential},
      {box_geometry(ext1), {5}, 3, KernelKind::gaussian},
      {box_geometry(ext2), {3, 2}, 2, KernelKind::gaussian},
      {fixture::quarter_annulus(), {3, 3}, 2, KernelKind::exponential},
      {fixture::quarter_annulus(), {2, 3}, 3, KernelKind::gaussian},
      {half_cylinder(1.0, 2.0, 10.0), {2, 1, 2}, 2, KernelKind::exponential},
  };
  for (const auto& c : cases) {
    const CovarianceKernel k{c.kind, 1.2, 0.8};
    const auto s = fixture::galerkin(c.g, k, c.p, c.elements);
    const auto dense = assemble_ibq_dense(s.trial(), s.interpolation(), c.g, k);
    const auto probed = probe_galerkin(s);
    CHECK(oracle::rel_diff(probed, dense_standard_form(dense)) <= 1e-11);

    const double scale = probed.cwiseAbs().maxCoeff();
    CHECK((probed - probed.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (probed + probed.transpose()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * scale);
  }
}

TEST_CASE("constant kernel gives a rank-one operator") {
  const double variance = 2.0;
  const std::vector<int> el{3, 2};
  const std::vector<double> ext{1.5, 0.8};
  const auto annulus = fixture::quarter_annulus();
  const auto box = box_geometry(ext);
  for (const auto* g : {&annulus, &box}) {
    const auto s = fixture::galerkin(*g, {KernelKind::constant, variance, 1.0}, 2, el);
    const auto a = probe_galerkin(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const auto ev = es.eigenvalues();
    CHECK(std::abs(ev(ev.size() - 2)) <= 1e-12 * ev(ev.size() - 1));
    const double area = g == &box ? 1.2 : std::numbers::pi * 3.0 / 4.0;
    // Exact on the box; the interpolated sqrt(det) perturbs it on the annulus.
    CHECK(ev(ev.size() - 1) == Approx(variance * area).epsilon(g == &box ? 1e-12 : 1e-3));
  }
}

TEST_CASE("back transform and eigenfunction normalization") {
  const auto g = fixture::quarter_annulus();
  const std::vector<int> el{4, 3};
  const auto s = fixture::galerkin(g, {KernelKind::gaussian, 1.0, 0.6}, 2, el);
  const auto res = fixture::solve(s, 3);
  REQUIRE(res.converged);
  const Eigen::MatrixXd z = dense_kronecker(s.mass().factors());

  std::vector<ElementQuadrature> q;
  for (int dir = 0; dir < 2; ++dir) q.push_back(element_quadrature(s.trial().direction(dir), 6));

  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto c = back_transform(s, res.eigenvectors[i]);
    const Eigen::Map<const Eigen::VectorXd> cv(c.data(), static_cast<Eigen::Index>(c.size()));
    CHECK(cv.dot(z * cv) == Approx(1.0).epsilon(1e-10));

    // Physical L2 norm by quadrature of the eigenfunction.
    double norm = 0.0;
    for (std::size_t a = 0; a < q[0].points.size(); ++a) {
      for (std::size_t b = 0; b < q[1].points.size(); ++b) {
        const double x[2] = {q[0].points[a], q[1].points[b]};
        const double f = eval_eigenfunction(s, c, x);
        norm += q[0].weights[a] * q[1].weights[b] * g.jacobian_det(x) * f * f;
      }
    }
    CHECK(norm == Approx(1.0).epsilon(1e-9));
  }
  const auto c0 = back_transform(s, res.eigenvectors[0]);
  const auto c1 = back_transform(s, res.eigenvectors[1]);
  const Eigen::Map<const Eigen::VectorXd> v0(c0.data(), static_cast<Eigen::Index>(c0.size()));
  const Eigen::Map<const Eigen::VectorXd> v1(c1.data(), static_cast<Eigen::Index>(c1.size()));
  CHECK(std::abs(v0.dot(z * v1)) <= 1e-9);
}

TEST_CASE("exponential eigenvalues converge at second order") {
  const std::vector<double> ext{1.0};
  const auto g = box_geometry(ext);
  const CovarianceKernel k{KernelKind::exponential, 1.0, 1.0};
  const auto exact = oracle::exponential_eigenvalues(4, 1.0);
  std::vector<double> err;
  for (int e : {16, 32, 64}) {
    const std::vector<int> el{e};
    const auto res = fixture::solve(fixture::galerkin(g, k, 2, el), 4, {.tol = 1e-12});
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(res.eigenvalues[i] - exact[i]));
    err.push_back(worst);
  }
  CHECK(err[2] < 1e-4);
  CHECK(err[0] / err[1] > 3.0);
  CHECK(err[1] / err[2] > 3.0);
}

TEST_CASE("thread count does not change the result") {
  const auto g = fixture::quarter_annulus();
  const std::vector<int> el{5, 4};
  auto s = fixture::galerkin(g, {KernelKind::exponential, 1.0, 0.4}, 2, el);
  std::vector<double> v(s.size());
  std::mt19937 rng(31);
  for (double& a : v) a = std::normal_distribution<double>()(rng);
  const auto one = apply_galerkin(s, v);
  s.set_threads(4);
  CHECK(apply_galerkin(s, v) == one);
}

TEST_CASE("galerkin argument checks") {
  const auto sq = unit_square();
  const CovarianceKernel k{KernelKind::gaussian, 1.0, 0.5};
  const std::vector<int> el{3, 3};
  const auto s = fixture::galerkin(sq, k, 2, el);
  std::vector<double> shorter(s.size() - 1);
  CHECK_THROWS_AS(apply_galerkin(s, shorter), ShapeError);
  CHECK_THROWS_AS(back_transform(s, shorter), ShapeError);

  const auto trial = polynomial_part(make_trial_space(sq, 2, el));
  const std::vector<int> other{4, 3};
  const auto interp = make_interpolation_space(sq, polynomial_part(make_trial_space(sq, 2, other)),
                                               InterpContinuity::cpm1);
  CHECK_THROWS_AS(build_galerkin(trial, interp, sq, k, 1), ParameterError);
  CHECK_THROWS_AS(make_interpolation_space(sq, trial, InterpContinuity::automatic), ParameterError);
  CHECK(resolve_continuity(InterpContinuity::automatic, KernelKind::exponential) == InterpContinuity::c0);
  CHECK(resolve_continuity(InterpContinuity::automatic, KernelKind::gaussian) == InterpContinuity::cpm1);
}
