#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "klexpand/eigensolver.hpp"
#include "klexpand/kernel.hpp"
#include "klexpand/spaces.hpp"

namespace klexpand {

enum class Method { galerkin_ibq, collocation, reference_galerkin, reference_collocation };

Method parse_method(const std::string& s);
std::string to_string(Method m);

struct GeometrySpec {
  std::string kind = "unit-interval";  // unit-interval | unit-square | unit-cube | box | half-cylinder
  std::vector<double> extents;         // box only
  double inner_radius = 1.0;
  double outer_radius = 2.0;
  double length = 10.0;

  int dim() const;
};

/// Benchmark configuration. Text form, one `key = value` per line, `#` starts a comment:
///
///   method                     galerkin-ibq | collocation | reference-galerkin | reference-collocation
///   case                       free-form label copied to summary.csv
///   kernel.kind                exponential | gaussian | constant
///   kernel.variance            > 0
///   kernel.correlation_length  > 0
///   geometry                   unit-interval | unit-square | unit-cube | box | half-cylinder
///   geometry.extents           comma list (box)
///   geometry.inner_radius, geometry.outer_radius, geometry.length   (half-cylinder)
///   degree | galerkin.degree   polynomial degree p
///   elements                   comma list, one per direction (a single value is broadcast)
///   galerkin.interp_continuity auto | c0 | cpm1
///   collocation.nq_per_dir     Gauss points per direction and element (0 = p+1)
///   collocation.bspline_z      true | false
///   reference.nq               Gauss points per direction for the dense reference (0 = p+2)
///   eigen.num_pairs, eigen.tol, eigen.max_iter, eigen.seed
///   threads                    kernel workers (KLEXPAND_THREADS overrides)
///   output                     output directory, relative to the config file
///   reference                  eigenvalue file (CSV with an `eigenvalue` column or one value
///                              per line), or `analytic` for the 1D exponential kernel
///   line_samples               points in the modes_line.csv sweep
struct BenchmarkConfig {
  Method method = Method::galerkin_ibq;
  std::string case_label;
  CovarianceKernel kernel{KernelKind::exponential, 1.0, 1.0};
  GeometrySpec geometry;
  int degree = 2;
  std::vector<int> elements{16};
  InterpContinuity interp_continuity = InterpContinuity::automatic;
  int nq_per_dir = 0;
  bool bspline_z = false;
  int reference_nq = 0;
  int num_pairs = 20;
  EigenOptions eigen;
  int threads = 0;
  std::filesystem::path output = ".";
  bool output_given = false;
  std::string reference;  // empty, "analytic" or a path
  int line_samples = 101;

  /// Elements per direction with a single entry broadcast to the geometry dimension.
  std::vector<int> resolved_elements() const;
  /// Field-level checks that need no allocation; throws ConfigError.
  void validate() const;
};

/// Parses the text form. Relative `output` and `reference` paths are resolved against
/// `base_dir`. Throws ConfigError naming the line and key.
BenchmarkConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
BenchmarkConfig load_config(const std::filesystem::path& file);

}  // namespace klexpand
