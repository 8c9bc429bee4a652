#include "klexpand/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "klexpand/error.hpp"

namespace klexpand {

GeometryMap::GeometryMap(BasisSpace space, std::vector<double> control_points, std::string name)
    : space_(std::move(space)), control_points_(std::move(control_points)), name_(std::move(name)) {
  const auto expected = static_cast<std::size_t>(space_.size()) * static_cast<std::size_t>(space_.dim());
  if (control_points_.size() != expected) {
    throw ParameterError("GeometryMap: expected " + std::to_string(expected) +
                         " control point coordinates, got " + std::to_string(control_points_.size()));
  }
}

GeometryMap::Eval GeometryMap::evaluate(std::span<const double> xhat, std::span<const Side> sides,
                                        bool derivatives) const {
  const int d = dim();
  if (xhat.size() != static_cast<std::size_t>(d)) throw ShapeError("GeometryMap: point dimension mismatch");
  for (int k = 0; k < d; ++k) {
    const double x = xhat[static_cast<std::size_t>(k)];
    if (!(x >= 0.0 && x <= 1.0)) {
      throw DomainError("GeometryMap: parametric coordinate " + std::to_string(x) + " outside [0, 1]");
    }
  }
  std::array<BasisDerivatives, 3> per;
  for (int k = 0; k < d; ++k) {
    const Side s = sides.empty() ? Side::right : sides[static_cast<std::size_t>(k)];
    per[static_cast<std::size_t>(k)] = eval_basis_derivatives(space_.direction(k), xhat[static_cast<std::size_t>(k)], s);
  }
  const auto sizes = space_.sizes();
  const bool rational = space_.rational();
  double w = 0.0;
  std::array<double, 3> dw{};
  Point p{};
  std::array<double, 9> dp{};
  const std::size_t l0 = per[0].values.size();
  const std::size_t l1 = d > 1 ? per[1].values.size() : 1;
  const std::size_t l2 = d > 2 ? per[2].values.size() : 1;
  for (std::size_t c = 0; c < l2; ++c) {
    for (std::size_t b = 0; b < l1; ++b) {
      for (std::size_t a = 0; a < l0; ++a) {
        const std::array<std::size_t, 3> loc{a, b, c};
        int idx = 0;
        for (int k = d - 1; k >= 0; --k) {
          idx = idx * sizes[static_cast<std::size_t>(k)] + per[static_cast<std::size_t>(k)].first +
                static_cast<int>(loc[static_cast<std::size_t>(k)]);
        }
        const double wi = rational ? space_.weights()[static_cast<std::size_t>(idx)] : 1.0;
        double val = wi;
        std::array<double, 3> grad{wi, wi, wi};
        for (int k = 0; k < d; ++k) {
          const auto& pk = per[static_cast<std::size_t>(k)];
          const std::size_t lk = loc[static_cast<std::size_t>(k)];
          val *= pk.values[lk];
          for (int m = 0; m < d; ++m) {
            grad[static_cast<std::size_t>(m)] *= (m == k) ? pk.derivatives[lk] : pk.values[lk];
          }
        }
        const double* cp = control_points_.data() + static_cast<std::size_t>(idx) * static_cast<std::size_t>(d);
        w += val;
        for (int a2 = 0; a2 < d; ++a2) p[static_cast<std::size_t>(a2)] += val * cp[a2];
        if (derivatives) {
          for (int m = 0; m < d; ++m) {
            dw[static_cast<std::size_t>(m)] += grad[static_cast<std::size_t>(m)];
            for (int a2 = 0; a2 < d; ++a2) {
              dp[static_cast<std::size_t>(a2 * 3 + m)] += grad[static_cast<std::size_t>(m)] * cp[a2];
            }
          }
        }
      }
    }
  }
  Eval out;
  out.w = w;
  for (int a2 = 0; a2 < d; ++a2) out.x[static_cast<std::size_t>(a2)] = p[static_cast<std::size_t>(a2)] / w;
  if (derivatives) {
    for (int a2 = 0; a2 < d; ++a2) {
      for (int m = 0; m < d; ++m) {
        out.jac[static_cast<std::size_t>(a2 * d + m)] =
            (dp[static_cast<std::size_t>(a2 * 3 + m)] - out.x[static_cast<std::size_t>(a2)] * dw[static_cast<std::size_t>(m)]) / w;
      }
    }
  }
  return out;
}

Point GeometryMap::map_point(std::span<const double> xhat, std::span<const Side> sides) const {
  return evaluate(xhat, sides, false).x;
}

std::array<double, 9> GeometryMap::jacobian(std::span<const double> xhat,
                                            std::span<const Side> sides) const {
  return evaluate(xhat, sides, true).jac;
}

double GeometryMap::jacobian_det(std::span<const double> xhat, std::span<const Side> sides) const {
  const auto j = jacobian(xhat, sides);
  double det = 0.0;
  switch (dim()) {
    case 1:
      det = j[0];
      break;
    case 2:
      det = j[0] * j[3] - j[1] * j[2];
      break;
    default:
      det = j[0] * (j[4] * j[8] - j[5] * j[7]) - j[1] * (j[3] * j[8] - j[5] * j[6]) +
            j[2] * (j[3] * j[7] - j[4] * j[6]);
      break;
  }
  if (!(det > 0.0)) {
    throw DegenerateGeometryError("GeometryMap '" + name_ + "': non-positive Jacobian determinant " +
                                  std::to_string(det));
  }
  return det;
}

double GeometryMap::weight(std::span<const double> xhat) const {
  return evaluate(xhat, {}, false).w;
}

std::vector<double> GeometryMap::c0_breaks(int k) const {
  const auto& kv = space_.direction(k);
  const auto br = kv.breaks();
  const auto mult = kv.multiplicities();
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < br.size(); ++i) {
    if (mult[i] >= kv.degree()) out.push_back(br[i]);
  }
  return out;
}

GeometryMap box_geometry(std::span<const double> extents) {
  const int d = static_cast<int>(extents.size());
  if (d < 1 || d > 3) throw ParameterError("box_geometry: 1 to 3 extents required");
  for (double e : extents) {
    if (!(e > 0.0)) throw ParameterError("box_geometry: extents must be positive");
  }
  std::vector<KnotVector> dirs(static_cast<std::size_t>(d), KnotVector({0.0, 0.0, 1.0, 1.0}, 1));
  BasisSpace space(dirs);
  std::vector<double> cps;
  const int n = space.size();
  for (int idx = 0; idx < n; ++idx) {
    for (int k = 0; k < d; ++k) {
      const int bit = (idx >> k) & 1;
      cps.push_back(bit * extents[static_cast<std::size_t>(k)]);
    }
  }
  std::string name = "box";
  return GeometryMap(std::move(space), std::move(cps), name);
}

GeometryMap unit_interval() {
  const double e[] = {1.0};
  return box_geometry(e);
}

GeometryMap unit_square() {
  const double e[] = {1.0, 1.0};
  return box_geometry(e);
}

GeometryMap unit_cube() {
  const double e[] = {1.0, 1.0, 1.0};
  return box_geometry(e);
}

GeometryMap half_cylinder(double inner_r, double outer_r, double length) {
  if (!(inner_r > 0.0 && outer_r > inner_r && length > 0.0)) {
    throw ParameterError("half_cylinder: need 0 < inner_r < outer_r and length > 0");
  }
  // Two 90° rational Bézier arcs, traversed from 180° to 0° so that the map is
  // orientation preserving with (circumferential, radial, axial) ordering.
  const double s = std::sqrt(0.5);
  const double cx[] = {-1.0, -1.0, 0.0, 1.0, 1.0};
  const double cy[] = {0.0, 1.0, 1.0, 1.0, 0.0};
  const double cw[] = {1.0, s, 1.0, s, 1.0};
  KnotVector arc({0.0, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0}, 2);
  KnotVector line({0.0, 0.0, 1.0, 1.0}, 1);
  const double radius[] = {inner_r, outer_r};
  const double axial[] = {0.0, length};
  std::vector<double> weights;
  std::vector<double> cps;
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 5; ++i) {
        weights.push_back(cw[i]);
        cps.push_back(radius[j] * cx[i]);
        cps.push_back(radius[j] * cy[i]);
        cps.push_back(axial[k]);
      }
    }
  }
  BasisSpace space({arc, line, line}, std::move(weights));
  return GeometryMap(std::move(space), std::move(cps), "half-cylinder");
}

namespace {

template <typename Fn>
void for_each_element(const BasisSpace& space, Fn&& fn) {
  const int d = space.dim();
  std::array<std::vector<double>, 3> br;
  for (int k = 0; k < 3; ++k) br[static_cast<std::size_t>(k)] = k < d ? space.direction(k).breaks() : std::vector<double>{0.0, 1.0};
  for (std::size_t c = 0; c + 1 < br[2].size(); ++c) {
    for (std::size_t b = 0; b + 1 < br[1].size(); ++b) {
      for (std::size_t a = 0; a + 1 < br[0].size(); ++a) {
        ElementBox box;
        box.lo = {br[0][a], br[1][b], br[2][c]};
        box.hi = {br[0][a + 1], br[1][b + 1], br[2][c + 1]};
        fn(box);
      }
    }
  }
}

}  // namespace

double max_element_diameter(const GeometryMap& g, const BasisSpace& space) {
  const int d = g.dim();
  double best = 0.0;
  for_each_element(space, [&](const ElementBox& box) {
    std::vector<Point> corners;
    for (int c = 0; c < (1 << d); ++c) {
      std::array<double, 3> x{};
      for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = ((c >> k) & 1) ? box.hi[static_cast<std::size_t>(k)] : box.lo[static_cast<std::size_t>(k)];
      corners.push_back(g.map_point(std::span<const double>(x.data(), static_cast<std::size_t>(d))));
    }
    for (std::size_t i = 0; i < corners.size(); ++i) {
      for (std::size_t j = i + 1; j < corners.size(); ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
          const double diff = corners[i][static_cast<std::size_t>(k)] - corners[j][static_cast<std::size_t>(k)];
          s += diff * diff;
        }
        best = std::max(best, std::sqrt(s));
      }
    }
  });
  return best;
}

double physical_volume(const GeometryMap& g, const BasisSpace& space, int points_per_element) {
  const int d = g.dim();
  const auto rule = gauss_legendre(points_per_element);
  const int nq = rule.size();
  double vol = 0.0;
  for_each_element(space, [&](const ElementBox& box) {
    const int n1 = d > 1 ? nq : 1;
    const int n2 = d > 2 ? nq : 1;
    for (int c = 0; c < n2; ++c) {
      for (int b = 0; b < n1; ++b) {
        for (int a = 0; a < nq; ++a) {
          const int loc[3] = {a, b, c};
          std::array<double, 3> x{};
          double w = 1.0;
          for (int k = 0; k < d; ++k) {
            const double h = 0.5 * (box.hi[static_cast<std::size_t>(k)] - box.lo[static_cast<std::size_t>(k)]);
            x[static_cast<std::size_t>(k)] = box.lo[static_cast<std::size_t>(k)] + h * (rule.nodes[static_cast<std::size_t>(loc[k])] + 1.0);
            w *= h * rule.weights[static_cast<std::size_t>(loc[k])];
          }
          vol += w * g.jacobian_det(std::span<const double>(x.data(), static_cast<std::size_t>(d)));
        }
      }
    }
  });
  return vol;
}

}  // namespace klexpand
