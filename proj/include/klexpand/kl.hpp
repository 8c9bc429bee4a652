#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "klexpand/kernel.hpp"

namespace klexpand {

using FieldFunction = std::function<double(std::span<const double>)>;

/// Truncated expansion α_M(x) = μ(x) + Σ_{i≤M} sqrt(λ_i) φ_i(x) ξ_i.
/// Points passed to the evaluators are whatever coordinates they were built for
/// (the solvers hand out evaluators on parametric coordinates).
struct KLExpansion {
  FieldFunction mean;  // empty means μ = 0
  std::vector<double> eigenvalues;
  std::vector<FieldFunction> eigenfunctions;
  std::size_t truncation = 0;

  std::size_t available() const { return std::min(eigenvalues.size(), eigenfunctions.size()); }
  void validate() const;
};

/// draws × points matrix of realizations with i.i.d. standard normal ξ. Draw r uses an
/// mt19937_64 stream seeded from (seed, r), so results do not depend on `threads`.
Eigen::MatrixXd sample_field(const KLExpansion& kle, const PointSet& x, std::size_t draws,
                             std::uint64_t seed, int threads = 1);

/// Same with caller-supplied ξ (rows = draws, cols >= M).
Eigen::MatrixXd sample_field(const KLExpansion& kle, const PointSet& x, const Eigen::MatrixXd& xi);

/// Σ_{i≤M} λ_i φ_i(x)^2, the pointwise variance of α_M.
std::vector<double> pointwise_variance(const KLExpansion& kle, const PointSet& x);

/// Σ_{i≤M} λ_i.
double captured_variance(const KLExpansion& kle);

/// Largest |∫ φ_i φ_j - δ_ij| for i, j < M with the given quadrature.
double orthonormality_defect(const KLExpansion& kle, const PointSet& points,
                             std::span<const double> weights);

double relative_error(double lambda_ref, double lambda_h);
double mean_relative_error(std::span<const double> ref, std::span<const double> h, std::size_t m);

/// Flips v so its first entry with |v_i| > threshold * max|v| is positive (threshold 0:
/// first nonzero entry). Returns true if flipped.
bool fix_sign(std::span<double> v, double threshold = 0.0);

}  // namespace klexpand
