#pragma once

#include <span>
#include <string>
#include <vector>

namespace klexpand {

/// `constant` (Γ ≡ σ²) is a rank-one sanity kernel, not a model kernel.
enum class KernelKind { exponential, gaussian, constant };

KernelKind parse_kernel_kind(const std::string& s);
std::string to_string(KernelKind kind);

/// Isotropic stationary covariance Γ(x, y) in physical coordinates.
///   exponential: σ² exp(-|x-y| / b)
///   gaussian:    σ² exp(-|x-y|² / b²)
///   constant:    σ²
struct CovarianceKernel {
  KernelKind kind = KernelKind::exponential;
  double variance = 1.0;
  double correlation_length = 1.0;

  /// Throws ParameterError for non-positive variance or correlation length.
  void validate() const;
};

/// Flat list of points of a common dimension.
struct PointSet {
  int dim = 0;
  std::vector<double> coords;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  void push_back(std::span<const double> x);
};

/// Throws ShapeError if x and y differ in dimension.
double eval(const CovarianceKernel& k, std::span<const double> x, std::span<const double> y);

/// Γ(x_i, t) for every target t.
std::vector<double> row(const CovarianceKernel& k, std::span<const double> x_i, const PointSet& targets);

/// out_l = Σ_k Γ(target_l, source_k) v_k, one row at a time; Γ is never stored.
/// Rows are partitioned across `threads` workers (<= 0: default count); each row is
/// accumulated sequentially in source order, so the result is independent of the
/// worker count.
void apply_gamma(const CovarianceKernel& k, const PointSet& sources, const PointSet& targets,
                 std::span<const double> v, std::span<double> out, int threads = 1);
std::vector<double> apply_gamma(const CovarianceKernel& k, const PointSet& sources,
                                const PointSet& targets, std::span<const double> v, int threads = 1);

}  // namespace klexpand
