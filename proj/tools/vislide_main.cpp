// Benchmark CLI: runs solver sweeps from INI configs, validates schedule
// conditions, and evaluates certified sup-gaps of candidate points.
//
// Exit statuses: 0 pass, 1 bound-check fail, 2 usage/config error,
// 3 runtime abort.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "vislide/config.hpp"
#include "vislide/evaluation.hpp"
#include "vislide/experiment.hpp"
#include "vislide/schedule.hpp"

namespace {

using namespace vislide;

int do_run(const std::string& config_path, const RunOptions& options) {
  const ExperimentConfig cfg = load_experiment_config(config_path);
  const ExperimentOutcome outcome = run_experiment(cfg, options);
  for (const CellOutcome& cell : outcome.cells) {
    std::printf("N=%-6d seed=%-8llu gap=%.10g", cell.n,
                static_cast<unsigned long long>(cell.seed), cell.final_gap);
    if (outcome.bounds_applicable) {
      std::printf("  bound=%.10g  %s", cell.bound,
                  cell.final_gap <= cell.bound ? "ok" : "EXCEEDED");
    }
    std::printf("\n");
  }
  if (outcome.slope) std::printf("loglog slope: %.6f\n", *outcome.slope);
  std::printf("summary: %s\n", outcome.summary_path.c_str());
  std::printf("bound check: %s\n",
              !outcome.bounds_applicable ? "not applicable"
              : outcome.all_bounds_pass ? "pass"
                                        : "FAIL");
  return outcome.exit_status;
}

int do_validate(const std::string& config_path) {
  const ExperimentConfig cfg = load_experiment_config(config_path);
  if (cfg.solver == SolverKind::mirror_prox) {
    std::printf("mirror_prox baseline has no schedule conditions to check\n");
    return 0;
  }
  BuiltProblem built = build_problem(cfg.problem);
  const Point z0 = built.spec.setup.set.center();
  const double omega0 = omega(built.spec.setup, z0);
  const double l_eff =
      std::max(built.spec.lipschitz_l, 1e-12 * built.spec.lipschitz_m);
  const double m = built.spec.lipschitz_m;

  bool all_pass = true;
  std::string first_failure;
  for (int n : cfg.sweep) {
    const Schedule schedule =
        cfg.solver == SolverKind::mps
            ? schedule_deterministic(n, l_eff, m)
            : schedule_stochastic(n, l_eff, m, cfg.problem.sigma, omega0);
    const ValidationReport report = validate_schedule(
        schedule, l_eff, m,
        cfg.solver == SolverKind::mps ? ValidationMode::deterministic
                                      : ValidationMode::stochastic);
    std::printf("N=%-6d %s", n, report.all_pass ? "pass" : "FAIL");
    if (report.identity_checked) {
      std::printf("  identity_rel_err=%.3e", report.identity_worst_rel);
    }
    std::printf("\n");
    for (const ConditionReport& c : report.conditions) {
      std::printf("  %-22s %s  worst_margin=%.6e at k=%d,t=%d\n",
                  c.name.c_str(), c.pass ? "pass" : "FAIL", c.worst_margin,
                  c.worst_k, c.worst_t);
    }
    if (!report.all_pass) {
      all_pass = false;
      if (first_failure.empty()) first_failure = report.first_failure;
    }
  }
  if (!all_pass) {
    std::fprintf(stderr, "schedule validation failed: %s\n",
                 first_failure.c_str());
    return 2;
  }
  return 0;
}

int do_gap(const std::string& config_path, const std::string& point_path) {
  const ExperimentConfig cfg = load_experiment_config(config_path);
  BuiltProblem built = build_problem(cfg.problem);

  std::ifstream in(point_path);
  if (!in) throw ConfigError("config error: cannot open '" + point_path + "'");
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    // accept comma- or whitespace-separated values
    std::stringstream cell(token);
    std::string piece;
    while (std::getline(cell, piece, ',')) {
      if (piece.empty()) continue;
      try {
        values.push_back(std::stod(piece));
      } catch (const std::exception&) {
        throw ConfigError("config error: '" + piece + "' in " + point_path +
                          " is not a number");
      }
    }
  }
  if (values.size() != built.spec.dim) {
    throw ConfigError("config error: point has " +
                      std::to_string(values.size()) + " values, problem needs " +
                      std::to_string(built.spec.dim));
  }
  const Point z(std::move(values), built.spec.blocks);
  if (!built.spec.setup.set.member(z, 1e-9)) {
    throw ConfigError("config error: point is not feasible for the problem");
  }
  const GapReport report = sup_gap_saddle(*built.saddle, z);
  std::printf("sup_gap=%.17g method=%s certified=%s\n", report.sup_gap,
              report.method == GapMethod::closed_form_saddle
                  ? "closed_form_saddle"
                  : "vertex_enumeration",
              report.certified ? "true" : "false");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-order VI solver benchmark"};
  app.require_subcommand(1);

  std::string config_path, out_dir, point_path, format;
  RunOptions options;
  std::uint64_t seed_override = 0;

  CLI::App* run = app.add_subcommand("run", "run an experiment sweep");
  run->add_option("--config", config_path, "INI config path")->required();
  run->add_option("--out", out_dir, "output directory (overrides [output] dir)");
  auto* seed_opt =
      run->add_option("--seed-override", seed_override, "replace config seeds");
  run->add_option("--jobs", options.jobs, "parallel (N, seed) cells")
      ->check(CLI::PositiveNumber);
  run->add_option("--format", format, "csv | json | both");
  run->add_flag("--golden", options.golden,
                "zero elapsed_seconds for byte-stable output");

  CLI::App* validate =
      app.add_subcommand("validate", "check schedule conditions only");
  validate->add_option("--config", config_path, "INI config path")->required();

  CLI::App* gap = app.add_subcommand("gap", "certified sup-gap of a point");
  gap->add_option("--config", config_path, "INI config path")->required();
  gap->add_option("--point", point_path, "CSV file with the point")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      if (!out_dir.empty()) options.out_override = out_dir;
      if (seed_opt->count() > 0) options.seed_override = seed_override;
      if (!format.empty()) {
        if (format == "csv") {
          options.format_override = EmitKind::csv;
        } else if (format == "json") {
          options.format_override = EmitKind::json;
        } else if (format == "both") {
          options.format_override = EmitKind::both;
        } else {
          throw ConfigError("config error: --format must be csv | json | both");
        }
      }
      return do_run(config_path, options);
    }
    if (validate->parsed()) return do_validate(config_path);
    if (gap->parsed()) return do_gap(config_path, point_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime abort: %s\n", e.what());
    return 3;
  }
  return 2;
}
