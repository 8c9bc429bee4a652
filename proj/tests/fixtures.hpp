#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "klexpand/collocation.hpp"
#include "klexpand/eigensolver.hpp"
#include "klexpand/galerkin.hpp"
#include "klexpand/geometry.hpp"
#include "klexpand/spaces.hpp"

namespace fixture {

// Quarter annulus r in [ri, ro], angle from 90° down to 0° (positive Jacobian).
inline klexpand::GeometryMap quarter_annulus(double ri = 1.0, double ro = 2.0) {
  using namespace klexpand;
  const double s = std::sqrt(0.5);
  KnotVector arc({0, 0, 0, 1, 1, 1}, 2);
  KnotVector radial({0, 0, 1, 1}, 1);
  const double ax[3] = {0, 1, 1};
  const double ay[3] = {1, 1, 0};
  const double aw[3] = {1, s, 1};
  std::vector<double> cps;
  std::vector<double> w;
  for (double r : {ri, ro}) {
    for (int i = 0; i < 3; ++i) {
      cps.push_back(r * ax[i]);
      cps.push_back(r * ay[i]);
      w.push_back(aw[i]);
    }
  }
  return GeometryMap(BasisSpace({arc, radial}, w), cps, "quarter-annulus");
}

inline klexpand::GalerkinSetup galerkin(const klexpand::GeometryMap& g, const klexpand::CovarianceKernel& k,
                                        int p, std::span<const int> elements,
                                        klexpand::InterpContinuity c = klexpand::InterpContinuity::automatic) {
  using namespace klexpand;
  const auto trial = polynomial_part(make_trial_space(g, p, elements));
  const auto interp = make_interpolation_space(g, trial, resolve_continuity(c, k.kind));
  return build_galerkin(trial, interp, g, k, 1);
}

inline klexpand::CollocationSetup collocation(const klexpand::GeometryMap& g, const klexpand::CovarianceKernel& k,
                                              int p, std::span<const int> elements,
                                              klexpand::CollocationOptions opts = {}) {
  using namespace klexpand;
  opts.threads = 1;
  return build_collocation(make_trial_space(g, p, elements), g, k, opts);
}

inline klexpand::EigenResult solve(const klexpand::GalerkinSetup& s, std::size_t m,
                                   klexpand::EigenOptions opts = {}) {
  return klexpand::solve_symmetric([&](auto v, auto o) { s.apply(v, o); }, s.size(), m, opts);
}

inline klexpand::EigenResult solve(const klexpand::CollocationSetup& s, std::size_t m,
                                   klexpand::EigenOptions opts = {}) {
  return klexpand::solve_nonsymmetric([&](auto v, auto o) { s.apply(v, o); }, s.size(), m, opts);
}

}  // namespace fixture
