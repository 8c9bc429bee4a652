#include "klexpand/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "klexpand/error.hpp"

namespace klexpand {

BandedMatrix::BandedMatrix(int rows, int cols, std::vector<int> row_begin,
                           std::vector<int> row_end)
    : rows_(rows), cols_(cols), begin_(std::move(row_begin)), end_(std::move(row_end)) {
  if (rows < 0 || cols < 0 || begin_.size() != static_cast<std::size_t>(rows) ||
      end_.size() != static_cast<std::size_t>(rows)) {
    throw ShapeError("BandedMatrix: window arrays must have one entry per row");
  }
  offset_.resize(static_cast<std::size_t>(rows) + 1, 0);
  for (int i = 0; i < rows; ++i) {
    auto& b = begin_[static_cast<std::size_t>(i)];
    auto& e = end_[static_cast<std::size_t>(i)];
    if (b < 0 || e > cols || b > e) {
      throw ShapeError("BandedMatrix: invalid column window in row " + std::to_string(i));
    }
    offset_[static_cast<std::size_t>(i) + 1] = offset_[static_cast<std::size_t>(i)] +
                                               static_cast<std::size_t>(e - b);
  }
  values_.assign(offset_.back(), 0.0);
}

BandedMatrix BandedMatrix::identity(int n) {
  std::vector<int> b(static_cast<std::size_t>(n));
  std::vector<int> e(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    b[static_cast<std::size_t>(i)] = i;
    e[static_cast<std::size_t>(i)] = i + 1;
  }
  BandedMatrix m(n, n, std::move(b), std::move(e));
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

BandedMatrix BandedMatrix::from_dense(int rows, int cols, std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ShapeError("BandedMatrix::from_dense: size mismatch");
  }
  std::vector<int> b(static_cast<std::size_t>(rows), 0);
  std::vector<int> e(static_cast<std::size_t>(rows), 0);
  for (int i = 0; i < rows; ++i) {
    int first = cols;
    int last = -1;
    for (int j = 0; j < cols; ++j) {
      if (values[static_cast<std::size_t>(i) * cols + j] != 0.0) {
        first = std::min(first, j);
        last = j;
      }
    }
    if (last >= 0) {
      b[static_cast<std::size_t>(i)] = first;
      e[static_cast<std::size_t>(i)] = last + 1;
    }
  }
  BandedMatrix m(rows, cols, std::move(b), std::move(e));
  for (int i = 0; i < rows; ++i) {
    for (int j = m.row_begin(i); j < m.row_end(i); ++j) {
      m.at(i, j) = values[static_cast<std::size_t>(i) * cols + j];
    }
  }
  return m;
}

double BandedMatrix::operator()(int i, int j) const {
  const auto r = static_cast<std::size_t>(i);
  if (j < begin_[r] || j >= end_[r]) return 0.0;
  return values_[offset_[r] + static_cast<std::size_t>(j - begin_[r])];
}

double& BandedMatrix::at(int i, int j) {
  if (i < 0 || i >= rows_) throw ShapeError("BandedMatrix::at: row out of range");
  const auto r = static_cast<std::size_t>(i);
  if (j < begin_[r] || j >= end_[r]) {
    throw ShapeError("BandedMatrix::at: (" + std::to_string(i) + ", " + std::to_string(j) +
                     ") outside stored window");
  }
  return values_[offset_[r] + static_cast<std::size_t>(j - begin_[r])];
}

std::span<const double> BandedMatrix::row(int i) const {
  const auto r = static_cast<std::size_t>(i);
  return {values_.data() + offset_[r], offset_[r + 1] - offset_[r]};
}

std::span<double> BandedMatrix::row(int i) {
  const auto r = static_cast<std::size_t>(i);
  return {values_.data() + offset_[r], offset_[r + 1] - offset_[r]};
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(cols_) || y.size() != static_cast<std::size_t>(rows_)) {
    throw ShapeError("BandedMatrix::multiply: shape mismatch");
  }
  for (int i = 0; i < rows_; ++i) {
    const auto vals = row(i);
    const double* xs = x.data() + row_begin(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < vals.size(); ++k) acc += vals[k] * xs[k];
    y[static_cast<std::size_t>(i)] = acc;
  }
}

void BandedMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(rows_) || y.size() != static_cast<std::size_t>(cols_)) {
    throw ShapeError("BandedMatrix::multiply_transpose: shape mismatch");
  }
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < rows_; ++i) {
    const auto vals = row(i);
    double* ys = y.data() + row_begin(i);
    const double xi = x[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < vals.size(); ++k) ys[k] += vals[k] * xi;
  }
}

BandedMatrix BandedMatrix::transpose() const {
  std::vector<int> b(static_cast<std::size_t>(cols_), rows_);
  std::vector<int> e(static_cast<std::size_t>(cols_), 0);
  for (int i = 0; i < rows_; ++i) {
    for (int j = row_begin(i); j < row_end(i); ++j) {
      b[static_cast<std::size_t>(j)] = std::min(b[static_cast<std::size_t>(j)], i);
      e[static_cast<std::size_t>(j)] = std::max(e[static_cast<std::size_t>(j)], i + 1);
    }
  }
  for (int j = 0; j < cols_; ++j) {
    if (b[static_cast<std::size_t>(j)] >= e[static_cast<std::size_t>(j)]) {
      b[static_cast<std::size_t>(j)] = 0;
      e[static_cast<std::size_t>(j)] = 0;
    }
  }
  BandedMatrix t(cols_, rows_, std::move(b), std::move(e));
  for (int i = 0; i < rows_; ++i) {
    for (int j = row_begin(i); j < row_end(i); ++j) t.at(j, i) = (*this)(i, j);
  }
  return t;
}

std::vector<double> BandedMatrix::to_dense() const {
  std::vector<double> d(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0.0);
  for (int i = 0; i < rows_; ++i) {
    for (int j = row_begin(i); j < row_end(i); ++j) {
      d[static_cast<std::size_t>(i) * cols_ + j] = (*this)(i, j);
    }
  }
  return d;
}

int BandedMatrix::lower_bandwidth() const {
  int bw = 0;
  for (int i = 0; i < rows_; ++i) {
    if (row_end(i) > row_begin(i)) bw = std::max(bw, i - row_begin(i));
  }
  return bw;
}

int BandedMatrix::upper_bandwidth() const {
  int bw = 0;
  for (int i = 0; i < rows_; ++i) {
    if (row_end(i) > row_begin(i)) bw = std::max(bw, row_end(i) - 1 - i);
  }
  return bw;
}

namespace {

BandedMatrix make_band(int n, int below, int above) {
  std::vector<int> b(static_cast<std::size_t>(n));
  std::vector<int> e(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    b[static_cast<std::size_t>(i)] = std::max(0, i - below);
    e[static_cast<std::size_t>(i)] = std::min(n, i + above + 1);
  }
  return BandedMatrix(n, n, std::move(b), std::move(e));
}

double max_abs(const BandedMatrix& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (double v : a.row(i)) m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace

BandedMatrix banded_cholesky(const BandedMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("banded_cholesky: matrix must be square");
  const int n = a.rows();
  const int bw = std::max(a.lower_bandwidth(), a.upper_bandwidth());
  BandedMatrix l = make_band(n, bw, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = l.row_begin(i); j <= i; ++j) {
      double s = a(i, j);
      const int k0 = std::max(l.row_begin(i), l.row_begin(j));
      for (int k = k0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (j == i) {
        if (!(s > 0.0)) {
          throw FactorizationError("banded_cholesky: matrix not positive definite (pivot " +
                                   std::to_string(i) + ")");
        }
        l.at(i, i) = std::sqrt(s);
      } else {
        l.at(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

BandedLU banded_lu(const BandedMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("banded_lu: matrix must be square");
  const int n = a.rows();
  const int kl = a.lower_bandwidth();
  const int ku = a.upper_bandwidth();
  BandedMatrix work = make_band(n, kl, ku);
  for (int i = 0; i < n; ++i) {
    for (int j = a.row_begin(i); j < a.row_end(i); ++j) work.at(i, j) = a(i, j);
  }
  const double tiny = 1e-14 * std::max(max_abs(a), 1e-300);
  for (int k = 0; k < n; ++k) {
    const double pivot = work(k, k);
    if (std::abs(pivot) <= tiny) {
      throw FactorizationError("banded_lu: zero pivot at row " + std::to_string(k));
    }
    for (int i = k + 1; i <= std::min(n - 1, k + kl); ++i) {
      double& lik = work.at(i, k);
      if (lik == 0.0) continue;
      lik /= pivot;
      for (int j = k + 1; j <= std::min(n - 1, k + ku); ++j) work.at(i, j) -= lik * work(k, j);
    }
  }
  BandedLU out{make_band(n, kl, 0), make_band(n, 0, ku)};
  for (int i = 0; i < n; ++i) {
    for (int j = out.lower.row_begin(i); j < i; ++j) out.lower.at(i, j) = work(i, j);
    out.lower.at(i, i) = 1.0;
    for (int j = i; j < out.upper.row_end(i); ++j) out.upper.at(i, j) = work(i, j);
  }
  return out;
}

void solve_lower(const BandedMatrix& l, double* x, std::size_t stride, bool unit_diagonal) {
  const int n = l.rows();
  for (int i = 0; i < n; ++i) {
    double s = x[static_cast<std::size_t>(i) * stride];
    const int jb = l.row_begin(i);
    const auto vals = l.row(i);
    for (int j = jb; j < i; ++j) {
      s -= vals[static_cast<std::size_t>(j - jb)] * x[static_cast<std::size_t>(j) * stride];
    }
    x[static_cast<std::size_t>(i) * stride] = unit_diagonal ? s : s / l(i, i);
  }
}

void solve_upper(const BandedMatrix& u, double* x, std::size_t stride, bool unit_diagonal) {
  const int n = u.rows();
  for (int i = n - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i) * stride];
    const int jb = u.row_begin(i);
    const auto vals = u.row(i);
    for (int j = std::max(i + 1, jb); j < u.row_end(i); ++j) {
      s -= vals[static_cast<std::size_t>(j - jb)] * x[static_cast<std::size_t>(j) * stride];
    }
    x[static_cast<std::size_t>(i) * stride] = unit_diagonal ? s : s / u(i, i);
  }
}

void solve_lower_transpose(const BandedMatrix& l, double* x, std::size_t stride,
                           bool unit_diagonal) {
  const int n = l.rows();
  for (int i = n - 1; i >= 0; --i) {
    double& xi = x[static_cast<std::size_t>(i) * stride];
    if (!unit_diagonal) xi /= l(i, i);
    const int jb = l.row_begin(i);
    const auto vals = l.row(i);
    for (int j = jb; j < i; ++j) {
      x[static_cast<std::size_t>(j) * stride] -= vals[static_cast<std::size_t>(j - jb)] * xi;
    }
  }
}

void solve_upper_transpose(const BandedMatrix& u, double* x, std::size_t stride,
                           bool unit_diagonal) {
  const int n = u.rows();
  for (int i = 0; i < n; ++i) {
    double& xi = x[static_cast<std::size_t>(i) * stride];
    if (!unit_diagonal) xi /= u(i, i);
    const int jb = u.row_begin(i);
    const auto vals = u.row(i);
    for (int j = std::max(i + 1, jb); j < u.row_end(i); ++j) {
      x[static_cast<std::size_t>(j) * stride] -= vals[static_cast<std::size_t>(j - jb)] * xi;
    }
  }
}

}  // namespace klexpand
