#pragma once

#include <Eigen/Dense>
#include <string>

#include "klexpand/bspline.hpp"
#include "klexpand/eigensolver.hpp"
#include "klexpand/geometry.hpp"
#include "klexpand/kernel.hpp"
#include "klexpand/spaces.hpp"

namespace klexpand {

/// Dense assembled systems A v = λ Z v used as ground truth on small problems.
enum class DenseMethod { galerkin_gauss, collocation, galerkin_ibq_dense };

struct DenseSystem {
  Eigen::MatrixXd a;
  Eigen::MatrixXd z;
  DenseMethod method = DenseMethod::galerkin_gauss;
};

/// Cap on the total number of quadrature points a dense assembly may use.
inline constexpr std::size_t kDenseQuadratureCap = 20000;

/// Standard Galerkin matrices with tensor Gauss quadrature (`nq` points per direction
/// and element), trial functions b_i / sqrt(det DF):
///   A_ij = ∫∫ N_i(x) Γ(x, x') N_j(x') dx' dx,  Z_ij = ∫ N_i N_j dx.
/// For the exponential kernel the inner integral over the element containing x is split
/// at x in every direction. A is symmetrized as (A + A^T)/2. Throws SizeError above the
/// quadrature cap.
DenseSystem assemble_galerkin_dense(const BasisSpace& trial, const GeometryMap& g,
                                    const CovarianceKernel& k, int nq,
                                    std::size_t cap = kDenseQuadratureCap);

/// Collocation matrices at the Greville abscissae with the same tensor Gauss rule:
///   A_ij = ∫ Γ(x_i, x') R_j(x') dx',  Z_ij = R_j(x_i).
DenseSystem assemble_collocation_dense(const BasisSpace& trial, const GeometryMap& g,
                                       const CovarianceKernel& k, int nq,
                                       std::size_t cap = kDenseQuadratureCap);

/// Dense composition A = M^T B̃^{-1} J Γ J B̃^{-T} M and the Kronecker mass matrix Z,
/// built with explicit Kronecker products. Throws SizeError if Ñ exceeds `max_interp`.
DenseSystem assemble_ibq_dense(const BasisSpace& trial, const BasisSpace& interp,
                               const GeometryMap& g, const CovarianceKernel& k,
                               std::size_t max_interp = 4000);

/// Dense standard-form matrix: L^{-1} A L^{-T} (Cholesky of Z) for the Galerkin tags,
/// Z^{-1} A (pivoted LU) for collocation.
Eigen::MatrixXd dense_standard_form(const DenseSystem& sys);

/// Full dense eigensolve of the pencil (A, Z); the top-m pairs, with eigenvectors
/// back-transformed to trial-basis coefficients. Throws FactorizationError for a
/// singular Z and SizeError for N > 2000.
EigenResult solve_dense_generalized(const DenseSystem& sys, std::size_t m);

/// Dense Kronecker product F_d ⊗ ... ⊗ F_1 of factors listed in direction order.
Eigen::MatrixXd dense_kronecker(const std::vector<BandedMatrix>& factors);

Eigen::MatrixXd to_eigen(const BandedMatrix& m);

}  // namespace klexpand
