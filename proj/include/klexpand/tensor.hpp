#pragma once

#include <span>
#include <vector>

#include "klexpand/banded.hpp"

namespace klexpand {

/// F_d ⊗ ... ⊗ F_2 ⊗ F_1 stored as its univariate factors.
///
/// `factor(k)` acts on direction k; direction 0 is the fastest-varying index of the
/// vectors the operator is applied to, so factor(0) is F_1 in the usual notation.
class KroneckerOperator {
 public:
  KroneckerOperator() = default;
  explicit KroneckerOperator(std::vector<BandedMatrix> factors);

  int dim() const { return static_cast<int>(factors_.size()); }
  const BandedMatrix& factor(int k) const { return factors_[static_cast<std::size_t>(k)]; }
  const std::vector<BandedMatrix>& factors() const { return factors_; }
  std::size_t rows() const;
  std::size_t cols() const;
  /// Largest intermediate length reached by a mode-by-mode application.
  std::size_t workspace_size() const;

 private:
  std::vector<BandedMatrix> factors_;
};

/// y = (F_d ⊗ ... ⊗ F_1) x by successive mode contractions in direction order 0, 1, ....
/// `work` must hold at least 2 * op.workspace_size() entries.
void kron_matvec(const KroneckerOperator& op, std::span<const double> x, std::span<double> y,
                 std::span<double> work);
std::vector<double> kron_matvec(const KroneckerOperator& op, std::span<const double> x);

/// y = (F_d ⊗ ... ⊗ F_1)^T x.
void kron_matvec_transpose(const KroneckerOperator& op, std::span<const double> x,
                           std::span<double> y, std::span<double> work);
std::vector<double> kron_matvec_transpose(const KroneckerOperator& op, std::span<const double> x);

/// Per-direction lower Cholesky factors of an SPD Kronecker matrix.
struct KroneckerCholesky {
  std::vector<BandedMatrix> factors;
  std::size_t size() const;
};

/// Throws FactorizationError naming the direction whose factor is not SPD.
KroneckerCholesky kron_cholesky(const KroneckerOperator& op);

/// In place: v <- L^{-1} v, or L^{-T} v when `transpose` is set.
void kron_tri_solve(const KroneckerCholesky& ch, std::span<double> v, bool transpose);
std::vector<double> kron_tri_solve(const KroneckerCholesky& ch, std::span<const double> v,
                                   bool transpose);

/// Per-direction pivotless LU factors of a square Kronecker matrix.
struct KroneckerLU {
  std::vector<BandedLU> factors;
  std::size_t size() const;
};

/// Throws FactorizationError naming the direction with a singular factor.
KroneckerLU kron_lu(const KroneckerOperator& op);

/// In place: v <- B^{-1} v, or B^{-T} v when `transpose` is set.
void kron_lu_solve(const KroneckerLU& lu, std::span<double> v, bool transpose);

/// Elementwise product d ⊙ v.
std::vector<double> diag_scale(std::span<const double> d, std::span<const double> v);
void diag_scale_inplace(std::span<const double> d, std::span<double> v);

}  // namespace klexpand
