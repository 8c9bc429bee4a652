#pragma once

#include <span>
#include <string>
#include <vector>

#include "klexpand/bspline.hpp"
#include "klexpand/geometry.hpp"
#include "klexpand/kernel.hpp"

namespace klexpand {

/// Continuity of the IBQ interpolation space at element interfaces.
///   automatic: c0 for the exponential kernel, cpm1 otherwise
///   c0:        C^0 at every interior knot
///   cpm1:      C^{p-1} at every interior knot
/// Knots where the geometry is only C^0 are always made C^{-1}.
enum class InterpContinuity { automatic, c0, cpm1 };

InterpContinuity parse_interp_continuity(const std::string& s);
InterpContinuity resolve_continuity(InterpContinuity c, KernelKind kind);

/// Degree-p trial space on a uniform subdivision of [0,1]^d into `elements[k]` elements
/// per direction, merged with the breakpoints of the geometry. Interior knots are
/// C^{p-1} except where the geometry needs lower continuity to stay representable.
/// When the geometry is rational, the returned space carries NURBS weights obtained by
/// interpolating the geometry weight function (exact, since the space contains it).
BasisSpace make_trial_space(const GeometryMap& g, int degree, std::span<const int> elements);

/// The same space with the rational weights dropped.
BasisSpace polynomial_part(const BasisSpace& space);

/// Interpolation space on the mesh of `trial` with equal degree.
BasisSpace make_interpolation_space(const GeometryMap& g, const BasisSpace& trial,
                                    InterpContinuity continuity);

/// Uniform element counts, one per direction.
std::vector<int> uniform_elements(int dim, int elements);

}  // namespace klexpand
