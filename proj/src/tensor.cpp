#include "klexpand/tensor.hpp"

#include <algorithm>
#include <string>

#include "klexpand/error.hpp"

namespace klexpand {

KroneckerOperator::KroneckerOperator(std::vector<BandedMatrix> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) throw ShapeError("KroneckerOperator: need at least one factor");
}

std::size_t KroneckerOperator::rows() const {
  std::size_t n = 1;
  for (const auto& f : factors_) n *= static_cast<std::size_t>(f.rows());
  return n;
}

std::size_t KroneckerOperator::cols() const {
  std::size_t n = 1;
  for (const auto& f : factors_) n *= static_cast<std::size_t>(f.cols());
  return n;
}

std::size_t KroneckerOperator::workspace_size() const {
  std::vector<std::size_t> shape;
  for (const auto& f : factors_) shape.push_back(static_cast<std::size_t>(f.cols()));
  auto total = [&] {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
  };
  std::size_t best = total();
  // Forward and transposed application visit different intermediate shapes.
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    shape[k] = static_cast<std::size_t>(factors_[k].rows());
    best = std::max(best, total());
  }
  for (std::size_t k = 0; k < factors_.size(); ++k) shape[k] = static_cast<std::size_t>(factors_[k].cols());
  best = std::max(best, total());
  for (std::size_t k = 0; k < factors_.size(); ++k) shape[k] = static_cast<std::size_t>(factors_[k].rows());
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    shape[k] = static_cast<std::size_t>(factors_[k].cols());
    best = std::max(best, total());
  }
  return best;
}

namespace {

// out[a, i, b] = sum_j F(i, j) in[a, j, b] with `pre` the product of the faster extents.
void contract_mode(const BandedMatrix& f, bool transpose, std::size_t pre, std::size_t post,
                   const double* in, double* out) {
  const std::size_t n_in = static_cast<std::size_t>(transpose ? f.rows() : f.cols());
  const std::size_t n_out = static_cast<std::size_t>(transpose ? f.cols() : f.rows());
  std::fill(out, out + pre * n_out * post, 0.0);
  for (std::size_t b = 0; b < post; ++b) {
    const double* src = in + b * pre * n_in;
    double* dst = out + b * pre * n_out;
    for (int i = 0; i < f.rows(); ++i) {
      const auto vals = f.row(i);
      const int jb = f.row_begin(i);
      for (std::size_t k = 0; k < vals.size(); ++k) {
        const double c = vals[k];
        const std::size_t j = static_cast<std::size_t>(jb) + k;
        const std::size_t si = transpose ? static_cast<std::size_t>(i) : j;
        const std::size_t di = transpose ? j : static_cast<std::size_t>(i);
        const double* s = src + si * pre;
        double* t = dst + di * pre;
        for (std::size_t a = 0; a < pre; ++a) t[a] += c * s[a];
      }
    }
  }
}

void apply_kron(const KroneckerOperator& op, bool transpose, std::span<const double> x,
                std::span<double> y, std::span<double> work) {
  const std::size_t n_in = transpose ? op.rows() : op.cols();
  const std::size_t n_out = transpose ? op.cols() : op.rows();
  if (x.size() != n_in || y.size() != n_out) {
    throw ShapeError("kron_matvec: expected input of length " + std::to_string(n_in) +
                     " and output of length " + std::to_string(n_out));
  }
  const std::size_t ws = op.workspace_size();
  if (work.size() < 2 * ws) throw ShapeError("kron_matvec: workspace too small");
  const int d = op.dim();
  std::vector<std::size_t> shape(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    shape[static_cast<std::size_t>(k)] = static_cast<std::size_t>(transpose ? op.factor(k).rows() : op.factor(k).cols());
  }
  const double* src = x.data();
  double* bufs[2] = {work.data(), work.data() + ws};
  for (int k = 0; k < d; ++k) {
    std::size_t pre = 1;
    for (int j = 0; j < k; ++j) pre *= shape[static_cast<std::size_t>(j)];
    std::size_t post = 1;
    for (int j = k + 1; j < d; ++j) post *= shape[static_cast<std::size_t>(j)];
    double* dst = (k == d - 1) ? y.data() : bufs[k % 2];
    contract_mode(op.factor(k), transpose, pre, post, src, dst);
    shape[static_cast<std::size_t>(k)] = static_cast<std::size_t>(transpose ? op.factor(k).cols() : op.factor(k).rows());
    src = dst;
  }
}

// Calls fn(pointer to first entry, stride) for every fiber along direction k.
template <typename Fn>
void for_each_fiber(std::span<const int> shape, int k, double* data, Fn&& fn) {
  std::size_t pre = 1;
  for (int j = 0; j < k; ++j) pre *= static_cast<std::size_t>(shape[static_cast<std::size_t>(j)]);
  std::size_t post = 1;
  for (std::size_t j = static_cast<std::size_t>(k) + 1; j < shape.size(); ++j) post *= static_cast<std::size_t>(shape[j]);
  const std::size_t n = static_cast<std::size_t>(shape[static_cast<std::size_t>(k)]);
  for (std::size_t b = 0; b < post; ++b) {
    for (std::size_t a = 0; a < pre; ++a) fn(data + a + b * pre * n, pre);
  }
}

}  // namespace

void kron_matvec(const KroneckerOperator& op, std::span<const double> x, std::span<double> y,
                 std::span<double> work) {
  apply_kron(op, false, x, y, work);
}

std::vector<double> kron_matvec(const KroneckerOperator& op, std::span<const double> x) {
  std::vector<double> y(op.rows());
  std::vector<double> work(2 * op.workspace_size());
  kron_matvec(op, x, y, work);
  return y;
}

void kron_matvec_transpose(const KroneckerOperator& op, std::span<const double> x,
                           std::span<double> y, std::span<double> work) {
  apply_kron(op, true, x, y, work);
}

std::vector<double> kron_matvec_transpose(const KroneckerOperator& op, std::span<const double> x) {
  std::vector<double> y(op.cols());
  std::vector<double> work(2 * op.workspace_size());
  kron_matvec_transpose(op, x, y, work);
  return y;
}

std::size_t KroneckerCholesky::size() const {
  std::size_t n = 1;
  for (const auto& f : factors) n *= static_cast<std::size_t>(f.rows());
  return n;
}

KroneckerCholesky kron_cholesky(const KroneckerOperator& op) {
  KroneckerCholesky ch;
  for (int k = 0; k < op.dim(); ++k) {
    try {
      ch.factors.push_back(banded_cholesky(op.factor(k)));
    } catch (const FactorizationError& e) {
      throw FactorizationError("kron_cholesky: factor in direction " + std::to_string(k) +
                               " is not SPD (" + e.what() + ")");
    }
  }
  return ch;
}

void kron_tri_solve(const KroneckerCholesky& ch, std::span<double> v, bool transpose) {
  if (v.size() != ch.size()) throw ShapeError("kron_tri_solve: shape mismatch");
  std::vector<int> shape;
  for (const auto& f : ch.factors) shape.push_back(f.rows());
  for (int k = 0; k < static_cast<int>(shape.size()); ++k) {
    const auto& l = ch.factors[static_cast<std::size_t>(k)];
    for_each_fiber(shape, k, v.data(), [&](double* x, std::size_t stride) {
      if (transpose) {
        solve_lower_transpose(l, x, stride, false);
      } else {
        solve_lower(l, x, stride, false);
      }
    });
  }
}

std::vector<double> kron_tri_solve(const KroneckerCholesky& ch, std::span<const double> v,
                                   bool transpose) {
  std::vector<double> out(v.begin(), v.end());
  kron_tri_solve(ch, std::span<double>(out), transpose);
  return out;
}

std::size_t KroneckerLU::size() const {
  std::size_t n = 1;
  for (const auto& f : factors) n *= static_cast<std::size_t>(f.lower.rows());
  return n;
}

KroneckerLU kron_lu(const KroneckerOperator& op) {
  KroneckerLU lu;
  for (int k = 0; k < op.dim(); ++k) {
    try {
      lu.factors.push_back(banded_lu(op.factor(k)));
    } catch (const FactorizationError& e) {
      throw FactorizationError("kron_lu: factor in direction " + std::to_string(k) +
                               " is singular (" + e.what() + ")");
    }
  }
  return lu;
}

void kron_lu_solve(const KroneckerLU& lu, std::span<double> v, bool transpose) {
  if (v.size() != lu.size()) throw ShapeError("kron_lu_solve: shape mismatch");
  std::vector<int> shape;
  for (const auto& f : lu.factors) shape.push_back(f.lower.rows());
  for (int k = 0; k < static_cast<int>(shape.size()); ++k) {
    const auto& f = lu.factors[static_cast<std::size_t>(k)];
    for_each_fiber(shape, k, v.data(), [&](double* x, std::size_t stride) {
      if (transpose) {
        // (LU)^T = U^T L^T
        solve_upper_transpose(f.upper, x, stride, false);
        solve_lower_transpose(f.lower, x, stride, true);
      } else {
        solve_lower(f.lower, x, stride, true);
        solve_upper(f.upper, x, stride, false);
      }
    });
  }
}

std::vector<double> diag_scale(std::span<const double> d, std::span<const double> v) {
  if (d.size() != v.size()) throw ShapeError("diag_scale: length mismatch");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = d[i] * v[i];
  return out;
}

void diag_scale_inplace(std::span<const double> d, std::span<double> v) {
  if (d.size() != v.size()) throw ShapeError("diag_scale: length mismatch");
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= d[i];
}

}  // namespace klexpand
