#include "klexpand/collocation.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "klexpand/error.hpp"
#include "klexpand/parallel.hpp"

namespace klexpand {

struct CollocationSetup::SparseFactor {
  Eigen::SparseMatrix<double> z;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

CollocationSetup::CollocationSetup(BasisSpace trial, GeometryMap geometry, CovarianceKernel kernel)
    : trial_(std::move(trial)), geometry_(std::move(geometry)), kernel_(kernel) {}
CollocationSetup::CollocationSetup(CollocationSetup&&) noexcept = default;
CollocationSetup& CollocationSetup::operator=(CollocationSetup&&) noexcept = default;
CollocationSetup::~CollocationSetup() = default;

CollocationSetup build_collocation(const BasisSpace& trial, const GeometryMap& g,
                                   const CovarianceKernel& k, const CollocationOptions& opts) {
  k.validate();
  if (trial.dim() != g.dim()) throw ParameterError("build_collocation: dimension mismatch");
  const int d = trial.dim();
  int nq = opts.nq_per_dir;
  if (nq <= 0) {
    nq = 0;
    for (int dir = 0; dir < d; ++dir) nq = std::max(nq, trial.direction(dir).degree() + 1);
  }

  CollocationSetup s(trial, g, k);
  s.threads_ = opts.threads > 0 ? opts.threads : default_thread_count();

  // Quadrature table, element-major.
  std::array<ElementQuadrature, 3> eq;
  for (int dir = 0; dir < d; ++dir) eq[static_cast<std::size_t>(dir)] = element_quadrature(trial.direction(dir), nq);
  const auto count = [&](int dir) {
    return dir < d ? eq[static_cast<std::size_t>(dir)].spans.size() : std::size_t{1};
  };
  const int nq1 = d > 1 ? nq : 1;
  const int nq2 = d > 2 ? nq : 1;
  s.quad_points_.dim = d;
  for (std::size_t e2 = 0; e2 < count(2); ++e2) {
    for (std::size_t e1 = 0; e1 < count(1); ++e1) {
      for (std::size_t e0 = 0; e0 < count(0); ++e0) {
        const std::size_t elem[3] = {e0, e1, e2};
        for (int c = 0; c < nq2; ++c) {
          for (int b = 0; b < nq1; ++b) {
            for (int a = 0; a < nq; ++a) {
              const int loc[3] = {a, b, c};
              std::array<double, 3> x{};
              double w = 1.0;
              for (int dir = 0; dir < d; ++dir) {
                const auto& q = eq[static_cast<std::size_t>(dir)];
                const std::size_t qi = elem[dir] * static_cast<std::size_t>(nq) + static_cast<std::size_t>(loc[dir]);
                x[static_cast<std::size_t>(dir)] = q.points[qi];
                w *= q.weights[qi];
              }
              const std::span<const double> xs(x.data(), static_cast<std::size_t>(d));
              const auto pv = trial.evaluate(xs);
              if (s.local_count_ == 0) s.local_count_ = static_cast<int>(pv.indices.size());
              s.r_index_.insert(s.r_index_.end(), pv.indices.begin(), pv.indices.end());
              s.r_value_.insert(s.r_value_.end(), pv.values.begin(), pv.values.end());
              s.weights_.push_back(w);
              s.jdet_.push_back(g.jacobian_det(xs));
              const Point p = g.map_point(xs);
              s.quad_points_.coords.insert(s.quad_points_.coords.end(), p.begin(), p.begin() + d);
            }
          }
        }
      }
    }
  }

  // Collocation points and Z.
  const auto sizes = trial.sizes();
  std::vector<std::vector<double>> grev;
  for (int dir = 0; dir < d; ++dir) grev.push_back(greville_abscissae(trial.direction(dir)));
  const std::size_t n = static_cast<std::size_t>(trial.size());
  std::vector<Eigen::Triplet<double>> triplets;
  s.colloc_points_.dim = d;
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rem = idx;
    std::array<double, 3> x{};
    for (int dir = 0; dir < d; ++dir) {
      const auto nk = static_cast<std::size_t>(sizes[static_cast<std::size_t>(dir)]);
      x[static_cast<std::size_t>(dir)] = grev[static_cast<std::size_t>(dir)][rem % nk];
      rem /= nk;
    }
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(d));
    const Point p = g.map_point(xs);
    s.colloc_points_.coords.insert(s.colloc_points_.coords.end(), p.begin(), p.begin() + d);
    const auto pv = trial.evaluate(xs);
    for (std::size_t t = 0; t < pv.indices.size(); ++t) {
      if (pv.values[t] != 0.0) {
        triplets.emplace_back(static_cast<int>(idx), pv.indices[t], pv.values[t]);
      }
    }
  }

  if (opts.bspline_z && !trial.rational()) {
    std::vector<BandedMatrix> factors;
    for (int dir = 0; dir < d; ++dir) {
      factors.push_back(univariate_collocation(trial.direction(dir), grev[static_cast<std::size_t>(dir)]));
    }
    s.kron_z_matrix_ = KroneckerOperator(std::move(factors));
    s.kron_z_ = kron_lu(*s.kron_z_matrix_);
  } else {
    s.sparse_z_ = std::make_unique<CollocationSetup::SparseFactor>();
    auto& f = *s.sparse_z_;
    f.z.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    f.z.setFromTriplets(triplets.begin(), triplets.end());
    f.z.makeCompressed();
    f.lu.compute(f.z);
    if (f.lu.info() != Eigen::Success) {
      throw FactorizationError("build_collocation: collocation matrix Z is singular (" +
                               f.lu.lastErrorMessage() + ")");
    }
  }
  return s;
}

std::span<const int> CollocationSetup::basis_indices(std::size_t q) const {
  return {r_index_.data() + q * static_cast<std::size_t>(local_count_), static_cast<std::size_t>(local_count_)};
}

std::span<const double> CollocationSetup::basis_values(std::size_t q) const {
  return {r_value_.data() + q * static_cast<std::size_t>(local_count_), static_cast<std::size_t>(local_count_)};
}

void CollocationSetup::interpolate(std::span<const double> v, std::span<double> y) const {
  if (v.size() != size() || y.size() != num_quadrature_points()) {
    throw ShapeError("collocation interpolate: shape mismatch");
  }
  const std::size_t lc = static_cast<std::size_t>(local_count_);
  for (std::size_t q = 0; q < y.size(); ++q) {
    const int* idx = r_index_.data() + q * lc;
    const double* val = r_value_.data() + q * lc;
    double acc = 0.0;
    for (std::size_t t = 0; t < lc; ++t) acc += val[t] * v[static_cast<std::size_t>(idx[t])];
    y[q] = acc;
  }
}

void CollocationSetup::solve_z(std::span<double> z) const {
  if (z.size() != size()) throw ShapeError("collocation solve_z: shape mismatch");
  if (kron_z_) {
    kron_lu_solve(*kron_z_, z, false);
    return;
  }
  Eigen::Map<Eigen::VectorXd> zm(z.data(), static_cast<Eigen::Index>(z.size()));
  Eigen::VectorXd sol = sparse_z_->lu.solve(zm);
  zm = sol;
}

std::vector<double> CollocationSetup::multiply_z(std::span<const double> v) const {
  if (v.size() != size()) throw ShapeError("collocation multiply_z: shape mismatch");
  if (kron_z_matrix_) return kron_matvec(*kron_z_matrix_, v);
  Eigen::Map<const Eigen::VectorXd> vm(v.data(), static_cast<Eigen::Index>(v.size()));
  Eigen::VectorXd r = sparse_z_->z * vm;
  return {r.data(), r.data() + r.size()};
}

void CollocationSetup::apply(std::span<const double> v, std::span<double> out) const {
  const std::size_t n = size();
  if (v.size() != n || out.size() != n) {
    throw ShapeError("apply_collocation: expected vectors of length " + std::to_string(n));
  }
  std::vector<double> y(num_quadrature_points());
  interpolate(v, y);                                               // 1: interpolation
  for (std::size_t q = 0; q < y.size(); ++q) y[q] *= jdet_[q] * weights_[q];  // 2: scaling
  apply_gamma(kernel_, quad_points_, colloc_points_, y, out, threads_);      // 3: kernel rows
  solve_z(out);                                                    // 4: LU backsolve
}

std::vector<double> apply_collocation(const CollocationSetup& s, std::span<const double> v) {
  std::vector<double> out(s.size());
  s.apply(v, out);
  return out;
}

double CollocationSetup::eval_function(std::span<const double> v, std::span<const double> xhat) const {
  if (v.size() != size()) throw ShapeError("collocation eval_function: coefficient length mismatch");
  const auto pv = trial_.evaluate(xhat);
  double acc = 0.0;
  for (std::size_t t = 0; t < pv.indices.size(); ++t) acc += pv.values[t] * v[static_cast<std::size_t>(pv.indices[t])];
  return acc;
}

double CollocationSetup::l2_norm(std::span<const double> v) const {
  std::vector<double> y(num_quadrature_points());
  interpolate(v, y);
  double acc = 0.0;
  for (std::size_t q = 0; q < y.size(); ++q) acc += weights_[q] * jdet_[q] * y[q] * y[q];
  return std::sqrt(acc);
}

}  // namespace klexpand
