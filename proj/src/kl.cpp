#include "klexpand/kl.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "klexpand/error.hpp"
#include "klexpand/parallel.hpp"

namespace klexpand {

void KLExpansion::validate() const {
  if (truncation > available()) {
    throw TruncationError("truncation order " + std::to_string(truncation) + " exceeds the " +
                          std::to_string(available()) + " available eigenpairs");
  }
  for (std::size_t i = 0; i < truncation; ++i) {
    if (eigenvalues[i] < 0.0) throw DomainError("negative eigenvalue in the expansion");
    if (!eigenfunctions[i]) throw DomainError("missing eigenfunction evaluator");
  }
}

namespace {

// Basis table: rows = points, cols = sqrt(λ_i) φ_i(x).
Eigen::MatrixXd scaled_modes(const KLExpansion& kle, const PointSet& x) {
  const auto m = static_cast<Eigen::Index>(kle.truncation);
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(x.size()), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = std::sqrt(kle.eigenvalues[static_cast<std::size_t>(i)]);
    const auto& f = kle.eigenfunctions[static_cast<std::size_t>(i)];
    for (std::size_t p = 0; p < x.size(); ++p) phi(static_cast<Eigen::Index>(p), i) = s * f(x.point(p));
  }
  return phi;
}

Eigen::RowVectorXd mean_row(const KLExpansion& kle, const PointSet& x) {
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(x.size()));
  if (kle.mean) {
    for (std::size_t p = 0; p < x.size(); ++p) mu(static_cast<Eigen::Index>(p)) = kle.mean(x.point(p));
  }
  return mu;
}

}  // namespace

Eigen::MatrixXd sample_field(const KLExpansion& kle, const PointSet& x, const Eigen::MatrixXd& xi) {
  kle.validate();
  if (static_cast<std::size_t>(xi.cols()) < kle.truncation) {
    throw ShapeError("sample_field: fewer xi columns than the truncation order");
  }
  const Eigen::MatrixXd phi = scaled_modes(kle, x);
  const Eigen::RowVectorXd mu = mean_row(kle, x);
  const auto m = static_cast<Eigen::Index>(kle.truncation);
  Eigen::MatrixXd out = xi.leftCols(m) * phi.transpose();
  out.rowwise() += mu;
  return out;
}

Eigen::MatrixXd sample_field(const KLExpansion& kle, const PointSet& x, std::size_t draws,
                             std::uint64_t seed, int threads) {
  kle.validate();
  const auto m = static_cast<Eigen::Index>(kle.truncation);
  Eigen::MatrixXd xi(static_cast<Eigen::Index>(draws), m);
  parallel_for(draws, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
      std::mt19937_64 gen(seq);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Eigen::Index i = 0; i < m; ++i) xi(static_cast<Eigen::Index>(r), i) = normal(gen);
    }
  });
  return sample_field(kle, x, xi);
}

std::vector<double> pointwise_variance(const KLExpansion& kle, const PointSet& x) {
  kle.validate();
  const Eigen::MatrixXd phi = scaled_modes(kle, x);
  std::vector<double> out(x.size());
  for (std::size_t p = 0; p < x.size(); ++p) out[p] = phi.row(static_cast<Eigen::Index>(p)).squaredNorm();
  return out;
}

double captured_variance(const KLExpansion& kle) {
  kle.validate();
  double s = 0.0;
  for (std::size_t i = 0; i < kle.truncation; ++i) s += kle.eigenvalues[i];
  return s;
}

double orthonormality_defect(const KLExpansion& kle, const PointSet& points,
                             std::span<const double> weights) {
  kle.validate();
  if (weights.size() != points.size()) throw ShapeError("orthonormality_defect: weight count mismatch");
  const auto m = static_cast<Eigen::Index>(kle.truncation);
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(points.size()), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < points.size(); ++p) {
      phi(static_cast<Eigen::Index>(p), i) = kle.eigenfunctions[static_cast<std::size_t>(i)](points.point(p));
    }
  }
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const Eigen::MatrixXd gram = phi.transpose() * w.asDiagonal() * phi;
  return (gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
}

double relative_error(double lambda_ref, double lambda_h) {
  if (!(lambda_ref > 0.0)) throw DomainError("relative_error: reference eigenvalue must be positive");
  return std::abs(lambda_ref - lambda_h) / lambda_ref;
}

double mean_relative_error(std::span<const double> ref, std::span<const double> h, std::size_t m) {
  if (m == 0) throw DomainError("mean_relative_error: m must be positive");
  if (ref.size() < m || h.size() < m) throw DomainError("mean_relative_error: fewer than m entries");
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += relative_error(ref[i], h[i]);
  return s / static_cast<double>(m);
}

bool fix_sign(std::span<double> v, double threshold) {
  double vmax = 0.0;
  for (double a : v) vmax = std::max(vmax, std::abs(a));
  const double cut = threshold * vmax;
  const auto it = std::find_if(v.begin(), v.end(), [&](double a) { return a != 0.0 && std::abs(a) > cut; });
  if (it == v.end() || *it > 0.0) return false;
  for (double& a : v) a = -a;
  return true;
}

}  // namespace klexpand
