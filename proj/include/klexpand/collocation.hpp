#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "klexpand/bspline.hpp"
#include "klexpand/geometry.hpp"
#include "klexpand/kernel.hpp"
#include "klexpand/tensor.hpp"

namespace klexpand {

struct CollocationOptions {
  /// Gauss points per direction and element; 0 selects p+1.
  int nq_per_dir = 0;
  /// For polynomial trial spaces, factor Z as a Kronecker product of univariate
  /// collocation matrices instead of a global sparse LU.
  bool bspline_z = false;
  /// Workers for the kernel stage; <= 0 selects the default count.
  int threads = 0;
};

/// Matrix-free isogeometric collocation at the Greville abscissae.
///
/// A_ij = ∫_D Γ(x_i, x') R_j(x') dx' is never formed. Its action is evaluated through a
/// quadrature table (basis values R, weights W, Jacobian determinants Jdet at every
/// quadrature point) and a row-at-a-time kernel sweep; Z_ij = R_j(x_i) is factored once
/// as P Z Q = L U and A' = Q U^{-1} L^{-1} P A.
class CollocationSetup {
 public:
  CollocationSetup(CollocationSetup&&) noexcept;
  CollocationSetup& operator=(CollocationSetup&&) noexcept;
  ~CollocationSetup();

  std::size_t size() const { return static_cast<std::size_t>(trial_.size()); }
  std::size_t num_quadrature_points() const { return weights_.size(); }
  /// Non-zero basis functions stored per quadrature point.
  int local_count() const { return local_count_; }

  const BasisSpace& trial() const { return trial_; }
  const GeometryMap& geometry() const { return geometry_; }
  const CovarianceKernel& kernel() const { return kernel_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& jacobian_dets() const { return jdet_; }
  const PointSet& quadrature_points() const { return quad_points_; }
  const PointSet& collocation_points() const { return colloc_points_; }
  /// Basis indices and values at quadrature point q.
  std::span<const int> basis_indices(std::size_t q) const;
  std::span<const double> basis_values(std::size_t q) const;
  bool uses_kronecker_z() const { return kron_z_.has_value(); }
  int threads() const { return threads_; }
  void set_threads(int threads) { threads_ = threads; }

  /// Step 1: y_k = Σ_j R_jk v_j.
  void interpolate(std::span<const double> v, std::span<double> y) const;
  /// Step 4: in place z <- Z^{-1} z through the pivoted factorization.
  void solve_z(std::span<double> z) const;
  /// Z v.
  std::vector<double> multiply_z(std::span<const double> v) const;

  /// out = A' v. Reentrant; allocates O(N_e·N_q + N) scratch per call.
  void apply(std::span<const double> v, std::span<double> out) const;

  /// Σ_j v_j R_j(x̂).
  double eval_function(std::span<const double> v, std::span<const double> xhat) const;
  /// L2(D) norm of Σ_j v_j R_j with the setup's quadrature.
  double l2_norm(std::span<const double> v) const;

 private:
  friend CollocationSetup build_collocation(const BasisSpace&, const GeometryMap&,
                                            const CovarianceKernel&, const CollocationOptions&);
  CollocationSetup(BasisSpace trial, GeometryMap geometry, CovarianceKernel kernel);

  struct SparseFactor;

  BasisSpace trial_;
  GeometryMap geometry_;
  CovarianceKernel kernel_;
  int local_count_ = 0;
  std::vector<int> r_index_;
  std::vector<double> r_value_;
  std::vector<double> weights_;
  std::vector<double> jdet_;
  PointSet quad_points_;
  PointSet colloc_points_;
  std::unique_ptr<SparseFactor> sparse_z_;
  std::optional<KroneckerLU> kron_z_;
  std::optional<KroneckerOperator> kron_z_matrix_;
  int threads_ = 1;
};

/// Tabulates the quadrature data and factors Z.
/// Throws FactorizationError for a singular Z and DegenerateGeometryError for a
/// non-positive Jacobian.
CollocationSetup build_collocation(const BasisSpace& trial, const GeometryMap& g,
                                   const CovarianceKernel& k, const CollocationOptions& opts = {});

std::vector<double> apply_collocation(const CollocationSetup& s, std::span<const double> v);

}  // namespace klexpand
