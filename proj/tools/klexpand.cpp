#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "klexpand/benchmark.hpp"
#include "klexpand/error.hpp"

namespace {

void print_report(const klexpand::RunReport& r) {
  std::printf("method %s  N %zu", klexpand::to_string(r.method).c_str(), r.n);
  if (r.ntilde) std::printf("  Ntilde %zu", *r.ntilde);
  std::printf("  h %.4g\n", r.h);
  std::printf("setup %.3fs  matvec %.3es  eigensolve %.3fs  iterations %d\n", r.setup_seconds,
              r.matvec_mean_seconds, r.eigensolve_seconds, r.iterations);
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    std::printf("%4zu  %.12g%s\n", i + 1, r.eigenvalues[i], r.complex_flags[i] ? "  (complex)" : "");
  }
  if (r.mean_rel_error) std::printf("mean relative error %.3e\n", *r.mean_rel_error);
  if (r.partial) std::printf("warning: partial convergence\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Karhunen-Loeve eigenpairs by matrix-free isogeometric Galerkin and collocation"};
  app.require_subcommand(1);

  std::string config_file;
  auto* run_cmd = app.add_subcommand("run", "solve one configuration");
  run_cmd->add_option("config", config_file, "configuration file")->required()->check(CLI::ExistingFile);

  std::string sweep_dir;
  auto* sweep_cmd = app.add_subcommand("sweep", "run every *.cfg in a directory and write summary.csv");
  sweep_cmd->add_option("dir", sweep_dir, "directory of configuration files")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      const auto cfg = klexpand::load_config(config_file);
      const auto rep = klexpand::run(cfg);
      print_report(rep);
      std::printf("wrote %s\n", cfg.output.string().c_str());
      return klexpand::exit_code(rep);
    }
    const auto res = klexpand::sweep(sweep_dir);
    for (const auto& r : res.reports) {
      std::printf("%-20s %-22s N %6zu  eigensolve %.3fs\n", r.case_label.c_str(), klexpand::to_string(r.method).c_str(),
                  r.n, r.eigensolve_seconds);
    }
    for (const auto& f : res.failures) std::fprintf(stderr, "failed: %s\n", f.c_str());
    return res.exit_code;
  } catch (const klexpand::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
