#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace klexpand {

/// Sparse matrix with one contiguous column window per row.
///
/// Row `i` stores the entries of columns [row_begin(i), row_end(i)). This covers
/// banded square matrices as well as the rectangular mixed mass matrices whose
/// band drifts with the row index. Entries outside a window are structural zeros.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int rows, int cols, std::vector<int> row_begin, std::vector<int> row_end);

  static BandedMatrix identity(int n);
  /// Builds from a row-major dense array, keeping the tightest window per row.
  static BandedMatrix from_dense(int rows, int cols, std::span<const double> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int row_begin(int i) const { return begin_[static_cast<std::size_t>(i)]; }
  int row_end(int i) const { return end_[static_cast<std::size_t>(i)]; }

  double operator()(int i, int j) const;
  /// Mutable access; throws ShapeError when (i, j) lies outside the stored window.
  double& at(int i, int j);

  std::span<const double> row(int i) const;
  std::span<double> row(int i);

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  BandedMatrix transpose() const;
  std::vector<double> to_dense() const;

  /// max(i - row_begin(i)) over non-empty rows.
  int lower_bandwidth() const;
  /// max(row_end(i) - 1 - i) over non-empty rows.
  int upper_bandwidth() const;
  std::size_t nonzeros() const { return values_.size(); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> begin_;
  std::vector<int> end_;
  std::vector<std::size_t> offset_;
  std::vector<double> values_;
};

/// Lower Cholesky factor of a symmetric positive definite banded matrix.
/// Throws FactorizationError if a non-positive pivot appears.
BandedMatrix banded_cholesky(const BandedMatrix& a);

/// Doolittle LU without pivoting: a = lower * upper with unit diagonal in `lower`.
struct BandedLU {
  BandedMatrix lower;
  BandedMatrix upper;
};
/// Throws FactorizationError on a (numerically) zero pivot.
BandedLU banded_lu(const BandedMatrix& a);

// In-place triangular solves on a strided vector x[0], x[stride], ...
void solve_lower(const BandedMatrix& l, double* x, std::size_t stride, bool unit_diagonal);
void solve_upper(const BandedMatrix& u, double* x, std::size_t stride, bool unit_diagonal);
/// Solves L^T y = x for lower-triangular L.
void solve_lower_transpose(const BandedMatrix& l, double* x, std::size_t stride,
                           bool unit_diagonal);
/// Solves U^T y = x for upper-triangular U.
void solve_upper_transpose(const BandedMatrix& u, double* x, std::size_t stride,
                           bool unit_diagonal);

}  // namespace klexpand
