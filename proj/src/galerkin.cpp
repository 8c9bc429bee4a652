#include "klexpand/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "klexpand/error.hpp"
#include "klexpand/parallel.hpp"

namespace klexpand {

GalerkinSetup build_galerkin(const BasisSpace& trial, const BasisSpace& interp, const GeometryMap& g,
                             const CovarianceKernel& k, int threads) {
  k.validate();
  if (trial.rational()) throw ParameterError("build_galerkin: trial space must be polynomial");
  if (trial.dim() != interp.dim() || trial.dim() != g.dim()) {
    throw ParameterError("build_galerkin: trial, interpolation and geometry dimensions differ");
  }
  const int d = trial.dim();
  for (int dir = 0; dir < d; ++dir) {
    if (trial.direction(dir).breaks() != interp.direction(dir).breaks()) {
      throw ParameterError("build_galerkin: trial and interpolation meshes differ in direction " +
                           std::to_string(dir));
    }
  }
  if (interp.size() < trial.size()) {
    throw ParameterError("build_galerkin: interpolation space smaller than trial space");
  }

  GalerkinSetup s(trial, interp, g, k);
  s.threads_ = threads > 0 ? threads : default_thread_count();

  std::vector<BandedMatrix> m_factors;
  std::vector<BandedMatrix> b_factors;
  std::vector<BandedMatrix> z_factors;
  std::vector<std::vector<double>> grev(static_cast<std::size_t>(d));
  std::vector<std::vector<Side>> sides(static_cast<std::size_t>(d));
  for (int dir = 0; dir < d; ++dir) {
    const auto& ikv = interp.direction(dir);
    const auto& tkv = trial.direction(dir);
    auto& gd = grev[static_cast<std::size_t>(dir)];
    gd = greville_abscissae(ikv);
    for (int i = 0; i < ikv.size(); ++i) {
      sides[static_cast<std::size_t>(dir)].push_back(support_side(ikv, i, gd[static_cast<std::size_t>(i)]));
    }
    m_factors.push_back(univariate_mass(ikv, tkv));
    b_factors.push_back(univariate_collocation(ikv, gd));
    z_factors.push_back(univariate_mass(tkv, tkv));
  }
  s.mixed_mass_ = KroneckerOperator(std::move(m_factors));
  s.collocation_ = KroneckerOperator(std::move(b_factors));
  s.mass_ = KroneckerOperator(std::move(z_factors));
  s.collocation_lu_ = kron_lu(s.collocation_);
  s.z_cholesky_ = kron_cholesky(s.mass_);

  const auto sizes = interp.sizes();
  const std::size_t nt = static_cast<std::size_t>(interp.size());
  s.jacobian_weights_.resize(nt);
  s.points_.dim = d;
  s.points_.coords.reserve(nt * static_cast<std::size_t>(d));
  for (std::size_t idx = 0; idx < nt; ++idx) {
    std::size_t rem = idx;
    std::array<double, 3> x{};
    std::array<Side, 3> sd{Side::right, Side::right, Side::right};
    for (int dir = 0; dir < d; ++dir) {
      const auto nk = static_cast<std::size_t>(sizes[static_cast<std::size_t>(dir)]);
      const std::size_t i = rem % nk;
      rem /= nk;
      x[static_cast<std::size_t>(dir)] = grev[static_cast<std::size_t>(dir)][i];
      sd[static_cast<std::size_t>(dir)] = sides[static_cast<std::size_t>(dir)][i];
    }
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(d));
    const std::span<const Side> ss(sd.data(), static_cast<std::size_t>(d));
    s.jacobian_weights_[idx] = std::sqrt(g.jacobian_det(xs, ss));
    const Point p = g.map_point(xs, ss);
    s.points_.coords.insert(s.points_.coords.end(), p.begin(), p.begin() + d);
  }
  return s;
}

void GalerkinSetup::apply(std::span<const double> v, std::span<double> out) const {
  const std::size_t n = size();
  const std::size_t nt = interp_size();
  if (v.size() != n || out.size() != n) {
    throw ShapeError("apply_galerkin: expected vectors of length " + std::to_string(n));
  }
  // Two length-Ñ buffers plus the Kronecker ping-pong workspace.
  const std::size_t ws = std::max(mixed_mass_.workspace_size(), nt);
  std::vector<double> scratch(2 * nt + 2 * ws);
  std::span<double> a(scratch.data(), nt);
  std::span<double> b(scratch.data() + nt, nt);
  std::span<double> work(scratch.data() + 2 * nt, 2 * ws);
  std::span<double> a_trial = a.first(n);

  std::copy(v.begin(), v.end(), a_trial.begin());
  kron_tri_solve(z_cholesky_, a_trial, true);                      // 1: L^{-T}
  kron_matvec(mixed_mass_, a_trial, b, work);                      // 2: M
  kron_lu_solve(collocation_lu_, b, true);                         // 3: B̃^{-T}
  diag_scale_inplace(jacobian_weights_, b);                        // 4: J
  apply_gamma(kernel_, points_, points_, b, a, threads_);          // 5: Γ
  diag_scale_inplace(jacobian_weights_, a);                        // 6: J
  kron_lu_solve(collocation_lu_, a, false);                        // 7: B̃^{-1}
  kron_matvec_transpose(mixed_mass_, a, out, work);                // 8: M^T
  kron_tri_solve(z_cholesky_, out, false);                         // 9: L^{-1}
}

std::vector<double> apply_galerkin(const GalerkinSetup& s, std::span<const double> v) {
  std::vector<double> out(s.size());
  s.apply(v, out);
  return out;
}

std::vector<double> back_transform(const GalerkinSetup& s, std::span<const double> v) {
  if (v.size() != s.size()) throw ShapeError("back_transform: length mismatch");
  return kron_tri_solve(s.mass_cholesky(), v, true);
}

double eval_eigenfunction(const GalerkinSetup& s, std::span<const double> coeffs,
                          std::span<const double> xhat) {
  if (coeffs.size() != s.size()) throw ShapeError("eval_eigenfunction: coefficient length mismatch");
  const auto pv = s.trial().evaluate(xhat);
  double acc = 0.0;
  for (std::size_t k = 0; k < pv.indices.size(); ++k) {
    acc += coeffs[static_cast<std::size_t>(pv.indices[k])] * pv.values[k];
  }
  return acc / std::sqrt(s.geometry().jacobian_det(xhat));
}

}  // namespace klexpand
