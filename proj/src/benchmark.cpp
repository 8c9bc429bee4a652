#include "klexpand/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "klexpand/collocation.hpp"
#include "klexpand/error.hpp"
#include "klexpand/galerkin.hpp"
#include "klexpand/geometry.hpp"
#include "klexpand/kl.hpp"
#include "klexpand/parallel.hpp"
#include "klexpand/reference.hpp"
#include "klexpand/spaces.hpp"

namespace klexpand {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GeometryMap make_geometry(const GeometrySpec& s) {
  if (s.kind == "unit-interval") return unit_interval();
  if (s.kind == "unit-square") return unit_square();
  if (s.kind == "unit-cube") return unit_cube();
  if (s.kind == "box") return box_geometry(s.extents);
  if (s.kind == "half-cylinder") return half_cylinder(s.inner_radius, s.outer_radius, s.length);
  throw ConfigError("geometry: unknown geometry '" + s.kind + "'");
}

int resolve_threads(int configured) {
  if (std::getenv("KLEXPAND_THREADS")) return default_thread_count();
  return configured > 0 ? configured : default_thread_count();
}

// Tensor Gauss rule over the mesh of `space`: calls body(xhat, weight * det DF).
void for_each_quadrature_point(const BasisSpace& space, const GeometryMap& g, int nq,
                               const std::function<void(std::span<const double>, double)>& body) {
  const int d = space.dim();
  std::vector<ElementQuadrature> rules;
  for (int k = 0; k < d; ++k) rules.push_back(element_quadrature(space.direction(k), nq));
  std::array<std::size_t, 3> count{1, 1, 1};
  for (int k = 0; k < d; ++k) count[static_cast<std::size_t>(k)] = rules[static_cast<std::size_t>(k)].points.size();
  std::array<double, 3> x{};
  for (std::size_t c = 0; c < count[2]; ++c) {
    for (std::size_t b = 0; b < count[1]; ++b) {
      for (std::size_t a = 0; a < count[0]; ++a) {
        const std::size_t idx[3] = {a, b, c};
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
          const auto& r = rules[static_cast<std::size_t>(k)];
          x[static_cast<std::size_t>(k)] = r.points[idx[k]];
          w *= r.weights[idx[k]];
        }
        const std::span<const double> xs(x.data(), static_cast<std::size_t>(d));
        body(xs, w * g.jacobian_det(xs));
      }
    }
  }
}

// Eigenfunction evaluators on parametric coordinates, one per computed pair.
using ModeEval = std::function<double(std::size_t, std::span<const double>)>;

struct Solved {
  EigenResult result;
  ModeEval mode;
  std::size_t ntilde = 0;
  bool has_ntilde = false;
  double setup_seconds = 0.0;
  double matvec_seconds = 0.0;
};

double time_applies(std::size_t n, const MatVec& op) {
  std::vector<double> v = seeded_start_vector(n, 99);
  std::vector<double> out(n);
  op(v, out);
  const auto t0 = Clock::now();
  for (int r = 0; r < kTimedApplies; ++r) op(v, out);
  return since(t0) / kTimedApplies;
}

EigenResult solve_guarded(const std::function<EigenResult()>& f, bool& partial) {
  try {
    return f();
  } catch (const ConvergenceError& e) {
    partial = true;
    return e.partial();
  }
}

}  // namespace

std::vector<double> analytic_exponential_eigenvalues(std::size_t count, double variance, double b,
                                                     double length) {
  const double a = 0.5 * length;
  const double c = 1.0 / b;
  const double pi = std::numbers::pi;
  auto bisect = [](const std::function<double(double)>& f, double lo, double hi) {
    const bool lo_pos = f(lo) > 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((f(mid) > 0.0) == lo_pos) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  std::vector<double> omega;
  const double eps = 1e-13;
  for (int k = 0; omega.size() < count; ++k) {
    // even: c = w tan(w a); odd: w = -c tan(w a)
    omega.push_back(bisect([&](double w) { return c - w * std::tan(w * a); }, (k * pi + eps) / a,
                           (k * pi + pi / 2 - eps) / a));
    omega.push_back(bisect([&](double w) { return w + c * std::tan(w * a); }, (k * pi + pi / 2 + eps) / a,
                           ((k + 1) * pi - eps) / a));
  }
  std::sort(omega.begin(), omega.end());
  std::vector<double> lam;
  for (std::size_t i = 0; i < count; ++i) lam.push_back(2.0 * b * variance / (1.0 + b * b * omega[i] * omega[i]));
  return lam;
}

std::vector<double> read_reference_eigenvalues(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("reference: cannot read " + file.string());
  std::string line;
  std::vector<double> out;
  int column = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      first = false;
      const auto it = std::find(cells.begin(), cells.end(), "eigenvalue");
      if (it != cells.end()) {
        column = static_cast<int>(it - cells.begin());
        continue;
      }
    }
    if (static_cast<std::size_t>(column) >= cells.size()) throw ConfigError("reference: short row in " + file.string());
    char* end = nullptr;
    const double v = std::strtod(cells[static_cast<std::size_t>(column)].c_str(), &end);
    if (end == cells[static_cast<std::size_t>(column)].c_str()) {
      throw ConfigError("reference: non-numeric entry in " + file.string());
    }
    out.push_back(v);
  }
  return out;
}

int exit_code(const RunReport& r) { return r.partial ? 3 : 0; }

RunReport run(const BenchmarkConfig& config) {
  config.validate();
  const GeometryMap g = make_geometry(config.geometry);
  const auto elements = config.resolved_elements();
  const int threads = resolve_threads(config.threads);
  const std::size_t m = static_cast<std::size_t>(config.num_pairs);

  RunReport rep;
  rep.case_label = config.case_label;
  rep.method = config.method;
  rep.degree = config.degree;

  const auto t_setup = Clock::now();
  const BasisSpace trial = make_trial_space(g, config.degree, elements);
  rep.h = max_element_diameter(g, trial);
  Solved s;

  switch (config.method) {
    case Method::galerkin_ibq: {
      const BasisSpace poly = polynomial_part(trial);
      const BasisSpace interp =
          make_interpolation_space(g, poly, resolve_continuity(config.interp_continuity, config.kernel.kind));
      auto setup = std::make_shared<GalerkinSetup>(build_galerkin(poly, interp, g, config.kernel, threads));
      s.setup_seconds = since(t_setup);
      const MatVec op = [setup](std::span<const double> v, std::span<double> out) { setup->apply(v, out); };
      s.matvec_seconds = time_applies(setup->size(), op);
      s.ntilde = setup->interp_size();
      s.has_ntilde = true;
      bool partial = false;
      const auto t0 = Clock::now();
      s.result = solve_guarded([&] { return solve_symmetric(op, setup->size(), m, config.eigen); }, partial);
      s.result.seconds = since(t0);
      rep.partial = partial;
      auto coeffs = std::make_shared<std::vector<std::vector<double>>>();
      for (const auto& v : s.result.eigenvectors) {
        coeffs->push_back(back_transform(*setup, v));
        fix_sign(coeffs->back(), 1e-8);
      }
      s.mode = [setup, coeffs](std::size_t i, std::span<const double> x) {
        return eval_eigenfunction(*setup, (*coeffs)[i], x);
      };
      break;
    }
    case Method::collocation: {
      CollocationOptions opts;
      opts.nq_per_dir = config.nq_per_dir;
      opts.bspline_z = config.bspline_z;
      opts.threads = threads;
      auto setup = std::make_shared<CollocationSetup>(build_collocation(trial, g, config.kernel, opts));
      s.setup_seconds = since(t_setup);
      const MatVec op = [setup](std::span<const double> v, std::span<double> out) { setup->apply(v, out); };
      s.matvec_seconds = time_applies(setup->size(), op);
      bool partial = false;
      const auto t0 = Clock::now();
      s.result = solve_guarded([&] { return solve_nonsymmetric(op, setup->size(), m, config.eigen); }, partial);
      s.result.seconds = since(t0);
      rep.partial = partial;
      auto coeffs = std::make_shared<std::vector<std::vector<double>>>();
      for (const auto& v : s.result.eigenvectors) {
        std::vector<double> c = v;
        const double norm = setup->l2_norm(c);
        for (double& a : c) a /= norm;
        fix_sign(c, 1e-8);
        coeffs->push_back(std::move(c));
      }
      s.mode = [setup, coeffs](std::size_t i, std::span<const double> x) {
        return setup->eval_function((*coeffs)[i], x);
      };
      break;
    }
    case Method::reference_galerkin:
    case Method::reference_collocation: {
      const bool gal = config.method == Method::reference_galerkin;
      const int nq = config.reference_nq > 0 ? config.reference_nq : config.degree + 2;
      const BasisSpace space = gal ? polynomial_part(trial) : trial;
      const DenseSystem sys =
          gal ? assemble_galerkin_dense(space, g, config.kernel, nq) : assemble_collocation_dense(space, g, config.kernel, nq);
      const Eigen::MatrixXd ap = dense_standard_form(sys);
      s.setup_seconds = since(t_setup);
      const MatVec op = [&ap](std::span<const double> v, std::span<double> out) {
        Eigen::Map<Eigen::VectorXd>(out.data(), ap.rows()) =
            ap * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      };
      s.matvec_seconds = time_applies(static_cast<std::size_t>(ap.rows()), op);
      const auto t0 = Clock::now();
      s.result = solve_dense_generalized(sys, m);
      s.result.seconds = since(t0);
      auto coeffs = std::make_shared<std::vector<std::vector<double>>>();
      for (const auto& v : s.result.eigenvectors) {
        std::vector<double> c = v;
        if (!gal) {
          double sq = 0.0;
          for_each_quadrature_point(space, g, nq, [&](std::span<const double> x, double w) {
            const auto pv = space.evaluate(x);
            double f = 0.0;
            for (std::size_t t = 0; t < pv.indices.size(); ++t) f += c[static_cast<std::size_t>(pv.indices[t])] * pv.values[t];
            sq += w * f * f;
          });
          for (double& a : c) a /= std::sqrt(sq);
        }
        fix_sign(c, 1e-8);
        coeffs->push_back(std::move(c));
      }
      auto sp = std::make_shared<BasisSpace>(space);
      auto geo = std::make_shared<GeometryMap>(g);
      s.mode = [sp, geo, coeffs, gal](std::size_t i, std::span<const double> x) {
        const auto pv = sp->evaluate(x);
        double f = 0.0;
        for (std::size_t t = 0; t < pv.indices.size(); ++t) f += (*coeffs)[i][static_cast<std::size_t>(pv.indices[t])] * pv.values[t];
        return gal ? f / std::sqrt(geo->jacobian_det(x)) : f;
      };
      break;
    }
  }

  rep.n = static_cast<std::size_t>(trial.size());
  if (s.has_ntilde) rep.ntilde = s.ntilde;
  rep.setup_seconds = s.setup_seconds;
  rep.matvec_mean_seconds = s.matvec_seconds;
  rep.eigensolve_seconds = s.result.seconds;
  rep.iterations = s.result.iterations;
  rep.eigenvalues = s.result.eigenvalues;
  rep.imag_parts = s.result.imag_parts;
  rep.residuals = s.result.residuals;
  rep.complex_flags = s.result.complex_flags;

  if (!config.reference.empty()) {
    if (config.reference == "analytic") {
      const double len = config.geometry.kind == "box" ? config.geometry.extents.front() : 1.0;
      rep.reference = analytic_exponential_eigenvalues(rep.eigenvalues.size(), config.kernel.variance,
                                                       config.kernel.correlation_length, len);
    } else {
      rep.reference = read_reference_eigenvalues(config.reference);
    }
    const std::size_t k = std::min(rep.reference.size(), rep.eigenvalues.size());
    for (std::size_t i = 0; i < k; ++i) rep.rel_errors.push_back(relative_error(rep.reference[i], rep.eigenvalues[i]));
    if (k > 0) rep.mean_rel_error = mean_relative_error(rep.reference, rep.eigenvalues, k);
  }

  std::filesystem::create_directories(config.output);
  {
    std::ofstream f(config.output / "eigenvalues.csv", std::ios::binary);
    f << "index,eigenvalue,imag_part,residual,complex_flag\n";
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
      f << i + 1 << ',' << g17(rep.eigenvalues[i]) << ',' << g17(rep.imag_parts[i]) << ',' << g17(rep.residuals[i])
        << ',' << (rep.complex_flags[i] ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream f(config.output / "timings.csv", std::ios::binary);
    f << "setup_seconds,matvec_mean_seconds,eigensolve_seconds,iterations,N,Ntilde\n";
    f << g17(rep.setup_seconds) << ',' << g17(rep.matvec_mean_seconds) << ',' << g17(rep.eigensolve_seconds) << ','
      << rep.iterations << ',' << rep.n << ',' << (rep.ntilde ? std::to_string(*rep.ntilde) : "") << '\n';
  }
  if (!rep.rel_errors.empty()) {
    std::ofstream f(config.output / "errors.csv", std::ios::binary);
    f << "index,reference,eigenvalue,rel_error\n";
    for (std::size_t i = 0; i < rep.rel_errors.size(); ++i) {
      f << i + 1 << ',' << g17(rep.reference[i]) << ',' << g17(rep.eigenvalues[i]) << ',' << g17(rep.rel_errors[i]) << '\n';
    }
  }
  {
    std::ofstream f(config.output / "modes_line.csv", std::ios::binary);
    f << "param_coord";
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) f << ",mode_" << i + 1;
    f << '\n';
    const int d = g.dim();
    for (int t = 0; t < config.line_samples; ++t) {
      const double u = static_cast<double>(t) / (config.line_samples - 1);
      const double x[3] = {u, 0.5, 0.5};
      const std::span<const double> xs(x, static_cast<std::size_t>(d));
      f << g17(u);
      for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) f << ',' << g17(s.mode(i, xs));
      f << '\n';
    }
  }
  return rep;
}

SweepResult sweep(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("sweep: not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("sweep: no .cfg files in " + dir.string());

  SweepResult res;
  std::ofstream summary(dir / "summary.csv", std::ios::binary);
  summary << "case,method,N,Ntilde,p,h,eigensolve_seconds,matvec_mean_seconds,mean_rel_error\n";
  for (const auto& file : files) {
    const std::string stem = file.stem().string();
    std::string label = stem;
    std::string method;
    try {
      BenchmarkConfig cfg = load_config(file);
      if (!cfg.case_label.empty()) label = cfg.case_label;
      method = to_string(cfg.method);
      if (!cfg.output_given) cfg.output = dir / "results" / stem;
      RunReport r = run(cfg);
      r.case_label = label;
      res.exit_code = std::max(res.exit_code, exit_code(r));
      summary << label << ',' << method << ',' << r.n << ',' << (r.ntilde ? std::to_string(*r.ntilde) : "") << ','
              << r.degree << ',' << g17(r.h) << ',' << g17(r.eigensolve_seconds) << ',' << g17(r.matvec_mean_seconds)
              << ',' << (r.mean_rel_error ? g17(*r.mean_rel_error) : "") << '\n';
      res.reports.push_back(std::move(r));
    } catch (const std::exception& e) {
      res.failures.push_back(stem + ": " + e.what());
      res.exit_code = std::max(res.exit_code, dynamic_cast<const ConfigError*>(&e) ? 2 : 1);
      summary << label << ',' << method << ",,,,,,,\n";
    }
    summary.flush();
  }
  return res;
}

}  // namespace klexpand
