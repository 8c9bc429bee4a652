#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "klexpand/banded.hpp"

namespace klexpand {

/// Which one-sided limit to take when a point sits on a knot where the basis is
/// discontinuous. Irrelevant everywhere else.
enum class Side { left, right };

/// Open (clamped) knot vector on [0, 1].
class KnotVector {
 public:
  /// Throws ParameterError unless the knots are non-decreasing, start at 0 with
  /// multiplicity degree+1, end at 1 with multiplicity degree+1, and interior
  /// multiplicities do not exceed degree+1.
  KnotVector(std::vector<double> knots, int degree);

  /// Uniform mesh with `elements` elements; every interior knot gets
  /// multiplicity degree - continuity (continuity in [-1, degree-1]).
  static KnotVector uniform(int degree, int elements, int continuity);
  /// Knots from distinct breakpoints (including 0 and 1) and the multiplicity
  /// of each interior breakpoint.
  static KnotVector from_breaks(int degree, std::span<const double> breaks,
                                std::span<const int> interior_multiplicity);

  int degree() const { return degree_; }
  /// Number of basis functions.
  int size() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  const std::vector<double>& knots() const { return knots_; }
  double operator[](int i) const { return knots_[static_cast<std::size_t>(i)]; }

  /// Distinct knot values, 0 and 1 included.
  std::vector<double> breaks() const;
  /// Multiplicity of each entry of breaks().
  std::vector<int> multiplicities() const;
  int num_elements() const { return static_cast<int>(breaks().size()) - 1; }

  /// Index mu with t_mu < t_{mu+1} and t_mu <= x <= t_{mu+1}. For x on an interior
  /// knot, Side::right picks the span starting there, Side::left the one ending there.
  int find_span(double x, Side side = Side::right) const;

 private:
  std::vector<double> knots_;
  int degree_ = 0;
};

/// The degree+1 possibly non-zero basis functions at a point.
struct BasisValues {
  int first = 0;
  std::vector<double> values;
};

/// Cox-de Boor evaluation. Throws DomainError for x outside [0, 1].
BasisValues eval_basis(const KnotVector& kv, double x, Side side = Side::right);

/// Values and first derivatives of the degree+1 non-zero functions.
struct BasisDerivatives {
  int first = 0;
  std::vector<double> values;
  std::vector<double> derivatives;
};
BasisDerivatives eval_basis_derivatives(const KnotVector& kv, double x, Side side = Side::right);

/// Knot averages (t_{i+1} + ... + t_{i+p}) / p; element midpoints for p = 0.
std::vector<double> greville_abscissae(const KnotVector& kv);

/// Side to use for a point attached to basis function `index`: the left limit when
/// the point sits on the right end of that function's support, the right limit otherwise.
Side support_side(const KnotVector& kv, int index, double x);

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n);

/// Gauss rule mapped onto every element of a knot vector.
struct ElementQuadrature {
  int points_per_element = 0;
  std::vector<double> points;   ///< element-major: element e owns [e*n, (e+1)*n)
  std::vector<double> weights;  ///< parametric weights, summing to 1 over [0, 1]
  std::vector<int> spans;       ///< knot span index per element
};
ElementQuadrature element_quadrature(const KnotVector& kv, int points_per_element);

/// Entry (i, j) = integral over [0, 1] of row_i * col_j, integrated exactly.
BandedMatrix univariate_mass(const KnotVector& rows, const KnotVector& cols);

/// Entry (i, j) = basis_j(points_i); row i is evaluated with support_side(kv, i, x_i).
/// Throws ShapeError unless points.size() == kv.size().
BandedMatrix univariate_collocation(const KnotVector& kv, std::span<const double> points);

enum class SpaceRole { trial, interpolation };

/// Tensor product B-spline or NURBS space on [0, 1]^d. Direction 0 varies fastest
/// in the global numbering.
class BasisSpace {
 public:
  BasisSpace() = default;
  /// Throws ParameterError for d outside 1..3, a weight count that does not match
  /// the dimension, or non-positive weights.
  explicit BasisSpace(std::vector<KnotVector> directions, std::vector<double> weights = {},
                      SpaceRole role = SpaceRole::trial);

  int dim() const { return static_cast<int>(directions_.size()); }
  int size() const;
  std::vector<int> sizes() const;
  const KnotVector& direction(int k) const { return directions_[static_cast<std::size_t>(k)]; }
  const std::vector<KnotVector>& directions() const { return directions_; }
  bool rational() const { return !weights_.empty(); }
  const std::vector<double>& weights() const { return weights_; }
  SpaceRole role() const { return role_; }
  int num_elements() const;

  /// Global index of a multi-index (direction 0 fastest).
  int flat_index(std::span<const int> multi) const;

  /// Non-zero functions at a point: global indices and values (NURBS when rational).
  struct PointValues {
    std::vector<int> indices;
    std::vector<double> values;
  };
  PointValues evaluate(std::span<const double> x, std::span<const Side> sides = {}) const;

 private:
  std::vector<KnotVector> directions_;
  std::vector<double> weights_;
  SpaceRole role_ = SpaceRole::trial;
};

}  // namespace klexpand
