#include <doctest.h>

#include <random>

#include "klexpand/bspline.hpp"
#include "klexpand/error.hpp"
#include "klexpand/reference.hpp"
#include "klexpand/tensor.hpp"

using namespace klexpand;
using doctest::Approx;

namespace {

BandedMatrix random_dense(int rows, int cols, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(rows * cols));
  for (double& a : v) a = u(rng);
  return BandedMatrix::from_dense(rows, cols, v);
}

BandedMatrix random_spd(int n, std::mt19937& rng) {
  const Eigen::MatrixXd a = to_eigen(random_dense(n, n, rng));
  const Eigen::MatrixXd s = a * a.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  std::vector<double> v(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(i * n + j)] = s(i, j);
  }
  return BandedMatrix::from_dense(n, n, v);
}

Eigen::VectorXd as_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> random_vector(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& a : v) a = u(rng);
  return v;
}

}  // namespace

TEST_CASE("banded storage round trip and products") {
  std::mt19937 rng(4);
  const auto kv = KnotVector::uniform(3, 6, 2);
  const auto m = univariate_mass(kv, kv);
  CHECK(m.lower_bandwidth() == 3);
  CHECK(m.upper_bandwidth() == 3);
  const auto d = m.to_dense();
  const auto again = BandedMatrix::from_dense(m.rows(), m.cols(), d);
  CHECK(again.to_dense() == d);
  const auto x = random_vector(static_cast<std::size_t>(m.cols()), rng);
  std::vector<double> y(static_cast<std::size_t>(m.rows()));
  m.multiply(x, y);
  CHECK((as_eigen(y) - to_eigen(m) * as_eigen(x)).cwiseAbs().maxCoeff() < 1e-15);
  m.multiply_transpose(x, y);
  CHECK((as_eigen(y) - to_eigen(m).transpose() * as_eigen(x)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((to_eigen(m.transpose()) - to_eigen(m).transpose()).norm() == 0.0);
  BandedMatrix id = BandedMatrix::identity(3);
  CHECK_THROWS_AS(id.at(0, 2), ShapeError);
}

TEST_CASE("kron_matvec examples") {
  std::mt19937 rng(5);
  const KroneckerOperator eye({BandedMatrix::identity(3), BandedMatrix::identity(2)});
  const auto v = random_vector(6, rng);
  CHECK(kron_matvec(eye, v) == v);

  // (A ⊗ B)(x ⊗ y) = (Ax) ⊗ (By) with B acting on the fastest index.
  const auto a = random_dense(2, 2, rng);
  const auto b = random_dense(3, 3, rng);
  const auto x = random_vector(2, rng);
  const auto y = random_vector(3, rng);
  std::vector<double> xy;
  for (double xi : x) {
    for (double yj : y) xy.push_back(xi * yj);
  }
  const KroneckerOperator ab({b, a});
  const auto lhs = kron_matvec(ab, xy);
  std::vector<double> ax(2);
  std::vector<double> by(3);
  a.multiply(x, ax);
  b.multiply(y, by);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(lhs[i * 3 + j] == Approx(ax[i] * by[j]).epsilon(1e-14));
  }

  CHECK_THROWS_AS(kron_matvec(ab, std::vector<double>(5)), ShapeError);
}

TEST_CASE("kron_matvec matches the dense Kronecker oracle") {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 3;
    std::vector<BandedMatrix> f;
    for (int k = 0; k < d; ++k) {
      f.push_back(random_dense(1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 6), rng));
    }
    const KroneckerOperator op(f);
    const Eigen::MatrixXd k = dense_kronecker(f);
    const auto v = random_vector(op.cols(), rng);
    const auto out = kron_matvec(op, v);
    const Eigen::VectorXd ref = k * as_eigen(v);
    CHECK((as_eigen(out) - ref).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    const auto w = random_vector(op.rows(), rng);
    const auto outt = kron_matvec_transpose(op, w);
    const Eigen::VectorXd reft = k.transpose() * as_eigen(w);
    CHECK((as_eigen(outt) - reft).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, reft.cwiseAbs().maxCoeff()));
    // ⟨F v, w⟩ = ⟨v, F^T w⟩
    CHECK(as_eigen(out).dot(as_eigen(w)) == Approx(as_eigen(v).dot(as_eigen(outt))).epsilon(1e-12));
  }
  const std::vector<BandedMatrix> three{random_dense(4, 4, rng), random_dense(4, 4, rng), random_dense(4, 4, rng)};
  const auto v = random_vector(64, rng);
  const Eigen::VectorXd ref = dense_kronecker(three) * as_eigen(v);
  CHECK((as_eigen(kron_matvec(KroneckerOperator(three), v)) - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kron_cholesky examples") {
  const auto ch = kron_cholesky(KroneckerOperator({BandedMatrix::identity(3), BandedMatrix::identity(4)}));
  for (const auto& l : ch.factors) CHECK((to_eigen(l) - Eigen::MatrixXd::Identity(l.rows(), l.cols())).norm() == 0.0);
  const std::vector<double> four{4.0};
  const auto scalar = kron_cholesky(KroneckerOperator({BandedMatrix::from_dense(1, 1, four)}));
  CHECK(scalar.factors[0](0, 0) == Approx(2.0));

  const auto kv = KnotVector::uniform(1, 4, 0);
  const auto m = univariate_mass(kv, kv);
  const auto l = to_eigen(kron_cholesky(KroneckerOperator({m})).factors[0]);
  CHECK((l * l.transpose() - to_eigen(m)).cwiseAbs().maxCoeff() < 1e-13);

  const std::vector<double> indefinite{1, 2, 2, 1};
  try {
    kron_cholesky(KroneckerOperator({m, BandedMatrix::from_dense(2, 2, indefinite)}));
    FAIL("expected a factorization error");
  } catch (const FactorizationError& e) {
    CHECK(std::string(e.what()).find("direction 1") != std::string::npos);
  }
}

TEST_CASE("kron_tri_solve round trip and dense oracle") {
  std::mt19937 rng(7);
  const std::vector<BandedMatrix> f{random_spd(4, rng), random_spd(3, rng)};
  const KroneckerOperator z(f);
  const auto ch = kron_cholesky(z);
  const KroneckerOperator lop(ch.factors);
  const auto v = random_vector(12, rng);
  CHECK(kron_tri_solve(kron_cholesky(KroneckerOperator({BandedMatrix::identity(12)})), v, false) == v);
  const auto lv = kron_matvec(lop, v);
  const auto back = kron_tri_solve(ch, lv, false);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(back[i] - v[i]) < 1e-11);
  const auto ltv = kron_matvec_transpose(lop, v);
  const auto back_t = kron_tri_solve(ch, ltv, true);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(back_t[i] - v[i]) < 1e-11);

  const Eigen::MatrixXd ld = dense_kronecker(ch.factors);
  const Eigen::VectorXd ref = ld.triangularView<Eigen::Lower>().solve(as_eigen(v));
  CHECK((as_eigen(kron_tri_solve(ch, v, false)) - ref).cwiseAbs().maxCoeff() < 1e-11);
  const Eigen::VectorXd ref_t = ld.transpose().triangularView<Eigen::Upper>().solve(as_eigen(v));
  CHECK((as_eigen(kron_tri_solve(ch, v, true)) - ref_t).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("kron_lu_solve against dense solves") {
  std::mt19937 rng(8);
  std::vector<BandedMatrix> f;
  for (int p : {2, 3, 1}) {
    const auto kv = KnotVector::uniform(p, 4, p - 1);
    f.push_back(univariate_collocation(kv, greville_abscissae(kv)));
  }
  const KroneckerOperator b(f);
  const auto lu = kron_lu(b);
  const Eigen::MatrixXd bd = dense_kronecker(f);
  const auto v = random_vector(b.rows(), rng);
  std::vector<double> x = v;
  kron_lu_solve(lu, x, false);
  CHECK((as_eigen(x) - bd.fullPivLu().solve(as_eigen(v))).cwiseAbs().maxCoeff() < 1e-11);
  x = v;
  kron_lu_solve(lu, x, true);
  CHECK((as_eigen(x) - bd.transpose().fullPivLu().solve(as_eigen(v))).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("diag_scale examples") {
  const std::vector<double> v{1.0, 1.0};
  const std::vector<double> ones{1.0, 1.0};
  CHECK(diag_scale(ones, v) == v);
  const std::vector<double> d{2.0, 3.0};
  CHECK(diag_scale(d, v) == std::vector<double>{2.0, 3.0});
  const std::vector<double> w{4.0, 9.0};
  const std::vector<double> root{2.0, 3.0};
  const std::vector<double> x{0.3, -1.2};
  const auto twice = diag_scale(root, diag_scale(root, x));
  const auto once = diag_scale(w, x);
  CHECK(twice[0] == Approx(once[0]));
  CHECK(twice[1] == Approx(once[1]));
  CHECK_THROWS_AS(diag_scale(d, std::vector<double>{1.0}), ShapeError);
}
