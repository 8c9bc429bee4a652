#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "klexpand/bspline.hpp"

namespace klexpand {

/// Physical point; only the first `dim` entries are meaningful.
using Point = std::array<double, 3>;

/// NURBS map F: [0,1]^d -> D ⊂ R^d.
class GeometryMap {
 public:
  /// `control_points` holds d coordinates per basis function of `space`, in the
  /// space's global numbering; rational weights (if any) live in `space`.
  GeometryMap(BasisSpace space, std::vector<double> control_points, std::string name = "nurbs");

  int dim() const { return space_.dim(); }
  const BasisSpace& space() const { return space_; }
  const std::vector<double>& control_points() const { return control_points_; }
  const std::string& name() const { return name_; }

  /// F(x̂). Throws DomainError outside [0,1]^d.
  Point map_point(std::span<const double> xhat, std::span<const Side> sides = {}) const;

  /// det DF(x̂) via analytic differentiation of the basis. One-sided limits are
  /// selected by `sides` on knots where the map is only C0.
  /// Throws DegenerateGeometryError when the determinant is not positive.
  double jacobian_det(std::span<const double> xhat, std::span<const Side> sides = {}) const;

  /// Full Jacobian, row-major d×d (entry (a, b) = dF_a / dx̂_b).
  std::array<double, 9> jacobian(std::span<const double> xhat, std::span<const Side> sides = {}) const;

  /// Value of the NURBS weight function at x̂ (1 for polynomial maps).
  double weight(std::span<const double> xhat) const;

  /// Interior breakpoints of direction k at which the map is only C0
  /// (knot multiplicity at least the degree).
  std::vector<double> c0_breaks(int k) const;

 private:
  struct Eval {
    Point x{};
    std::array<double, 9> jac{};
    double w = 1.0;
  };
  Eval evaluate(std::span<const double> xhat, std::span<const Side> sides, bool derivatives) const;

  BasisSpace space_;
  std::vector<double> control_points_;
  std::string name_;
};

/// Affine box [0, extents_0] × ... (degree-1 map). Throws ParameterError for non-positive extents.
GeometryMap box_geometry(std::span<const double> extents);
GeometryMap unit_interval();
GeometryMap unit_square();
GeometryMap unit_cube();

/// Quadratic NURBS half annulus swept along z. Direction 0 runs circumferentially over
/// 180° (two 90° rational segments, C0 at the crown x̂_0 = 1/2), direction 1 radially
/// from inner_r to outer_r, direction 2 axially from 0 to length.
GeometryMap half_cylinder(double inner_r, double outer_r, double length);

/// Parametric sub-box of an element as its lower and upper corners.
struct ElementBox {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
};

/// Largest physical element diameter (max distance between mapped element corners)
/// over the tensor mesh spanned by the breakpoints of `space`.
double max_element_diameter(const GeometryMap& g, const BasisSpace& space);

/// Quadrature estimate of |D| with `points_per_element` Gauss points per direction
/// on the mesh of `space`.
double physical_volume(const GeometryMap& g, const BasisSpace& space, int points_per_element);

}  // namespace klexpand
