#include "klexpand/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "klexpand/error.hpp"

namespace klexpand {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw ConfigError(key + ": " + msg);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) fail(key, "expected a number, got '" + v + "'");
  return d;
}

long to_long(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const long d = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) fail(key, "expected an integer, got '" + v + "'");
  return d;
}

int to_int(const std::string& key, const std::string& v) {
  const long d = to_long(key, v);
  if (d < -2147483647L || d > 2147483647L) fail(key, "integer out of range");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

Method parse_method(const std::string& s) {
  if (s == "galerkin-ibq" || s == "galerkin") return Method::galerkin_ibq;
  if (s == "collocation") return Method::collocation;
  if (s == "reference-galerkin") return Method::reference_galerkin;
  if (s == "reference-collocation") return Method::reference_collocation;
  throw ConfigError("method: unknown method '" + s + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::galerkin_ibq: return "galerkin-ibq";
    case Method::collocation: return "collocation";
    case Method::reference_galerkin: return "reference-galerkin";
    case Method::reference_collocation: return "reference-collocation";
  }
  return "?";
}

int GeometrySpec::dim() const {
  if (kind == "unit-interval") return 1;
  if (kind == "unit-square") return 2;
  if (kind == "unit-cube" || kind == "half-cylinder") return 3;
  if (kind == "box") return static_cast<int>(extents.size());
  return 0;
}

std::vector<int> BenchmarkConfig::resolved_elements() const {
  const int d = geometry.dim();
  if (elements.size() == 1 && d > 1) return std::vector<int>(static_cast<std::size_t>(d), elements.front());
  return elements;
}

void BenchmarkConfig::validate() const {
  static const std::set<std::string> kinds{"unit-interval", "unit-square", "unit-cube", "box", "half-cylinder"};
  if (!kinds.count(geometry.kind)) fail("geometry", "unknown geometry '" + geometry.kind + "'");
  if (geometry.kind == "box") {
    if (geometry.extents.empty() || geometry.extents.size() > 3) fail("geometry.extents", "need 1 to 3 extents");
    for (double e : geometry.extents) {
      if (!(e > 0.0)) fail("geometry.extents", "extents must be positive");
    }
  }
  if (geometry.kind == "half-cylinder") {
    if (!(geometry.inner_radius > 0.0)) fail("geometry.inner_radius", "must be positive");
    if (!(geometry.outer_radius > geometry.inner_radius)) fail("geometry.outer_radius", "must exceed the inner radius");
    if (!(geometry.length > 0.0)) fail("geometry.length", "must be positive");
    if (degree < 2) fail("degree", "the half-cylinder needs degree >= 2");
  }
  if (degree < 1 || degree > 10) fail("degree", "must be in [1, 10]");
  const auto el = resolved_elements();
  if (static_cast<int>(el.size()) != geometry.dim()) {
    fail("elements", "expected 1 or " + std::to_string(geometry.dim()) + " entries");
  }
  for (int e : el) {
    if (e < 1) fail("elements", "counts must be positive");
  }
  if (!(kernel.variance > 0.0)) fail("kernel.variance", "must be positive");
  if (!(kernel.correlation_length > 0.0)) fail("kernel.correlation_length", "must be positive");
  if (nq_per_dir < 0) fail("collocation.nq_per_dir", "must be >= 0");
  if (reference_nq < 0) fail("reference.nq", "must be >= 0");
  if (num_pairs < 1) fail("eigen.num_pairs", "must be positive");
  if (!(eigen.tol > 0.0)) fail("eigen.tol", "must be positive");
  if (eigen.max_iter < 1) fail("eigen.max_iter", "must be positive");
  if (line_samples < 2) fail("line_samples", "must be >= 2");
  if (bspline_z && geometry.kind == "half-cylinder") {
    fail("collocation.bspline_z", "needs a polynomial trial space; the half-cylinder is rational");
  }
  std::size_t n = 1;
  for (std::size_t k = 0; k < el.size(); ++k) {
    int nk = el[k] + degree;
    // The crown of the half-cylinder adds a C0 knot at 0.5 in direction 0.
    if (geometry.kind == "half-cylinder" && k == 0) nk += el[k] % 2 == 0 ? 1 : 2;
    n *= static_cast<std::size_t>(nk);
  }
  if (n < static_cast<std::size_t>(num_pairs)) fail("eigen.num_pairs", "exceeds the number of unknowns (" + std::to_string(n) + ")");
  if ((method == Method::reference_galerkin || method == Method::reference_collocation) && n > 2000) {
    fail("method", "dense reference methods are limited to N <= 2000 (N = " + std::to_string(n) + ")");
  }
  if (reference == "analytic" &&
      (geometry.dim() != 1 || kernel.kind != KernelKind::exponential)) {
    fail("reference", "the analytic reference covers the 1D exponential kernel only");
  }
}

BenchmarkConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  BenchmarkConfig c;
  std::set<std::string> seen;
  std::stringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (key == "galerkin.degree") key = "degree";
    if (!seen.insert(key).second) fail(key, "duplicate key (line " + std::to_string(lineno) + ")");

    if (key == "method") {
      c.method = parse_method(v);
    } else if (key == "case") {
      c.case_label = v;
    } else if (key == "kernel.kind") {
      try {
        c.kernel.kind = parse_kernel_kind(v);
      } catch (const Error& e) {
        fail(key, e.what());
      }
    } else if (key == "kernel.variance") {
      c.kernel.variance = to_double(key, v);
    } else if (key == "kernel.correlation_length") {
      c.kernel.correlation_length = to_double(key, v);
    } else if (key == "geometry") {
      c.geometry.kind = v;
    } else if (key == "geometry.extents") {
      c.geometry.extents.clear();
      for (const auto& s : split_list(v)) c.geometry.extents.push_back(to_double(key, s));
    } else if (key == "geometry.inner_radius") {
      c.geometry.inner_radius = to_double(key, v);
    } else if (key == "geometry.outer_radius") {
      c.geometry.outer_radius = to_double(key, v);
    } else if (key == "geometry.length") {
      c.geometry.length = to_double(key, v);
    } else if (key == "degree") {
      c.degree = to_int(key, v);
    } else if (key == "elements") {
      c.elements.clear();
      for (const auto& s : split_list(v)) c.elements.push_back(to_int(key, s));
    } else if (key == "galerkin.interp_continuity") {
      try {
        c.interp_continuity = parse_interp_continuity(v);
      } catch (const Error& e) {
        fail(key, e.what());
      }
    } else if (key == "collocation.nq_per_dir") {
      c.nq_per_dir = to_int(key, v);
    } else if (key == "collocation.bspline_z") {
      c.bspline_z = to_bool(key, v);
    } else if (key == "reference.nq") {
      c.reference_nq = to_int(key, v);
    } else if (key == "eigen.num_pairs") {
      c.num_pairs = to_int(key, v);
    } else if (key == "eigen.tol") {
      c.eigen.tol = to_double(key, v);
    } else if (key == "eigen.max_iter") {
      c.eigen.max_iter = to_int(key, v);
    } else if (key == "eigen.seed") {
      const long s = to_long(key, v);
      if (s < 0) fail(key, "must be non-negative");
      c.eigen.seed = static_cast<std::uint64_t>(s);
    } else if (key == "threads") {
      c.threads = to_int(key, v);
    } else if (key == "output") {
      c.output = base_dir / v;
      c.output_given = true;
    } else if (key == "reference") {
      c.reference = (v.empty() || v == "analytic") ? v : (base_dir / v).string();
    } else if (key == "line_samples") {
      c.line_samples = to_int(key, v);
    } else {
      fail(key, "unknown key (line " + std::to_string(lineno) + ")");
    }
  }
  if (!seen.count("output")) c.output = base_dir;
  c.validate();
  return c;
}

BenchmarkConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

}  // namespace klexpand
