#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vislide/config.hpp"
#include "vislide/evaluation.hpp"
#include "vislide/solvers.hpp"

namespace vislide {

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;
  std::optional<EmitKind> format_override;
  int jobs = 1;
  // Writes elapsed_seconds as 0 so repeated runs are byte-identical.
  bool golden = false;
};

struct CellOutcome {
  int n = 0;
  std::uint64_t seed = 0;
  double final_gap = 0.0;
  double bound = 0.0;  // NaN when no bound applies (mirror_prox)
  OracleCounters totals;
  double elapsed_seconds = 0.0;
  std::string csv_path;
  std::string json_path;
};

struct ExperimentOutcome {
  std::vector<CellOutcome> cells;
  std::optional<double> slope;
  bool bounds_applicable = false;
  bool all_bounds_pass = true;
  std::string summary_path;
  int exit_status = 0;  // 0 pass, 1 bound-check fail
};

// Writes one row per trace entry with columns exactly
// k, grad_evals, h_evals, h_samples, gap, bound, elapsed_seconds
// (decimals with 17 significant digits, final line newline-terminated).
void emit_trace_csv(const Trace& trace, std::span<const double> gaps,
                    std::span<const double> bounds, const std::string& path);

// Executes the sweep: per (N, seed) builds and validates the schedule, runs
// the solver, evaluates the certified sup-gap of every averaged iterate,
// writes per-cell files and summary.json. Throws ConfigError on schedule
// validation failure, std::runtime_error on runtime aborts.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const RunOptions& options);

}  // namespace vislide
