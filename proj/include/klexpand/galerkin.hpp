#pragma once

#include <span>
#include <vector>

#include "klexpand/bspline.hpp"
#include "klexpand/geometry.hpp"
#include "klexpand/kernel.hpp"
#include "klexpand/tensor.hpp"

namespace klexpand {

/// Matrix-free isogeometric Galerkin operator with interpolation based quadrature.
///
/// Trial functions are b_i(x̂) / sqrt(det DF(x̂)) with plain B-splines b_i, so the mass
/// matrix is the parametric Kronecker matrix Z = Z_d ⊗ ... ⊗ Z_1 = L L^T. The kernel,
/// scaled by sqrt(det DF) on both sides, is interpolated in a second spline space at its
/// Greville points, which factors the system matrix as
///
///     A = M^T B̃^{-1} J Γ J B̃^{-T} M
///
/// with the mixed mass matrix M, the collocation matrix B̃ and J = diag(sqrt(det DF)).
/// The standard-form operator is A' = L^{-1} A L^{-T}.
class GalerkinSetup {
 public:
  std::size_t size() const { return z_cholesky_.size(); }
  std::size_t interp_size() const { return points_.size(); }

  const BasisSpace& trial() const { return trial_; }
  const BasisSpace& interpolation() const { return interp_; }
  const GeometryMap& geometry() const { return geometry_; }
  const CovarianceKernel& kernel() const { return kernel_; }

  const KroneckerOperator& mixed_mass() const { return mixed_mass_; }
  const KroneckerOperator& collocation() const { return collocation_; }
  const KroneckerOperator& mass() const { return mass_; }
  const KroneckerCholesky& mass_cholesky() const { return z_cholesky_; }
  const KroneckerLU& collocation_lu() const { return collocation_lu_; }
  /// sqrt(det DF) at the interpolation Greville points.
  const std::vector<double>& jacobian_weights() const { return jacobian_weights_; }
  /// Physical images of the interpolation Greville points.
  const PointSet& points() const { return points_; }
  int threads() const { return threads_; }
  void set_threads(int threads) { threads_ = threads; }

  /// out = A' v. Reentrant; allocates O(Ñ) scratch per call.
  void apply(std::span<const double> v, std::span<double> out) const;

 private:
  friend GalerkinSetup build_galerkin(const BasisSpace&, const BasisSpace&, const GeometryMap&,
                                      const CovarianceKernel&, int);
  GalerkinSetup(BasisSpace trial, BasisSpace interp, GeometryMap geometry, CovarianceKernel kernel)
      : trial_(std::move(trial)), interp_(std::move(interp)), geometry_(std::move(geometry)),
        kernel_(kernel) {}

  BasisSpace trial_;
  BasisSpace interp_;
  GeometryMap geometry_;
  CovarianceKernel kernel_;
  KroneckerOperator mixed_mass_;
  KroneckerOperator collocation_;
  KroneckerOperator mass_;
  KroneckerCholesky z_cholesky_;
  KroneckerLU collocation_lu_;
  std::vector<double> jacobian_weights_;
  PointSet points_;
  int threads_ = 1;
};

/// Assembles all univariate factors, the Jacobian diagonal and the Greville point cloud.
/// `trial` must be the polynomial (non-rational) trial space; `interp` must share its
/// breakpoints and satisfy dim(interp) >= dim(trial).
/// Throws FactorizationError (singular B̃_k or non-SPD Z_k, naming the direction),
/// DegenerateGeometryError, or ParameterError.
GalerkinSetup build_galerkin(const BasisSpace& trial, const BasisSpace& interp, const GeometryMap& g,
                             const CovarianceKernel& k, int threads = 0);

std::vector<double> apply_galerkin(const GalerkinSetup& s, std::span<const double> v);

/// Coefficients v^h = L^{-T} v' of the trial basis.
std::vector<double> back_transform(const GalerkinSetup& s, std::span<const double> v);

/// φ(F(x̂)) = Σ v_i b_i(x̂) / sqrt(det DF(x̂)).
double eval_eigenfunction(const GalerkinSetup& s, std::span<const double> coeffs,
                          std::span<const double> xhat);

}  // namespace klexpand
