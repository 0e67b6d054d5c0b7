#include "vislide/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "vislide/rng.hpp"

namespace vislide {

namespace {

using nlohmann::json;

std::string format_real(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

struct Cell {
  int n = 0;
  std::uint64_t seed = 0;
};

struct CellData {
  CellOutcome outcome;
};

double l_effective(const ProblemSpec& spec) {
  return std::max(spec.lipschitz_l, 1e-12 * spec.lipschitz_m);
}

}  // namespace

void emit_trace_csv(const Trace& trace, std::span<const double> gaps,
                    std::span<const double> bounds, const std::string& path) {
  if (gaps.size() != trace.entries.size() ||
      bounds.size() != trace.entries.size()) {
    throw std::invalid_argument(
        "emit_trace_csv: gap/bound lists must align with the trace");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("emit_trace_csv: cannot open '" + path +
                             "' for writing");
  }
  out << "k,grad_evals,h_evals,h_samples,gap,bound,elapsed_seconds\n";
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    const TraceEntry& e = trace.entries[i];
    out << e.k << ',' << e.counters.grad_g_evals << ',' << e.counters.h_evals
        << ',' << e.counters.h_samples << ',' << format_real(gaps[i]) << ','
        << format_real(bounds[i]) << ',' << format_real(e.elapsed_seconds)
        << '\n';
  }
  out.flush();
  if (!out) {
    throw std::runtime_error("emit_trace_csv: write to '" + path + "' failed");
  }
}

namespace {

json trace_to_json(const Trace& trace, std::span<const double> gaps,
                   std::span<const double> bounds) {
  json rows = json::array();
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    const TraceEntry& e = trace.entries[i];
    json row;
    row["k"] = e.k;
    row["grad_evals"] = e.counters.grad_g_evals;
    row["h_evals"] = e.counters.h_evals;
    row["h_samples"] = e.counters.h_samples;
    row["gap"] = gaps[i];
    row["bound"] = std::isnan(bounds[i]) ? json() : json(bounds[i]);
    row["elapsed_seconds"] = e.elapsed_seconds;
    rows.push_back(std::move(row));
  }
  json out;
  out["solver"] = trace.solver;
  out["problem"] = trace.problem;
  out["schedule"] = trace.schedule;
  out["seed"] = trace.seed;
  out["rows"] = std::move(rows);
  return out;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const RunOptions& options) {
  ExperimentConfig cfg = config;
  if (options.seed_override) cfg.seeds = {*options.seed_override};
  if (options.out_override) cfg.out_dir = *options.out_override;
  if (options.format_override) cfg.emit = *options.format_override;

  if (cfg.solver == SolverKind::smps && cfg.seeds.empty()) {
    throw ConfigError("config error: smps needs at least one seed");
  }

  std::filesystem::create_directories(cfg.out_dir);

  BuiltProblem built = build_problem(cfg.problem);
  const ProblemSpec& spec = built.spec;
  if (!built.saddle) {
    throw ConfigError("config error: problem has no certified gap oracle");
  }
  const Point z0 = spec.setup.set.center();
  const double omega0 = omega(spec.setup, z0);
  const double l_eff = l_effective(spec);
  const double m = spec.lipschitz_m;
  const bool l_was_floored = l_eff > spec.lipschitz_l;

  const char* solver_name = cfg.solver == SolverKind::mps ? "mps"
                            : cfg.solver == SolverKind::smps ? "smps"
                                                             : "mirror_prox";

  // Validate schedules upfront; a failure aborts the whole run.
  std::map<int, ValidationReport> validations;
  if (cfg.solver != SolverKind::mirror_prox) {
    for (int n : cfg.sweep) {
      Schedule schedule =
          cfg.solver == SolverKind::mps
              ? schedule_deterministic(n, l_eff, m)
              : schedule_stochastic(n, l_eff, m, cfg.problem.sigma, omega0);
      ValidationReport report = validate_schedule(
          schedule, l_eff, m,
          cfg.solver == SolverKind::mps ? ValidationMode::deterministic
                                        : ValidationMode::stochastic);
      if (!report.all_pass) {
        throw ConfigError("schedule validation failed: " +
                          report.first_failure);
      }
      validations.emplace(n, std::move(report));
    }
  }

  const double mp_step =
      cfg.mirror_prox_step.value_or(default_mirror_prox_step(l_eff, m));

  // Cell list: (N, seed) for smps, one seed otherwise.
  std::vector<Cell> cells;
  for (int n : cfg.sweep) {
    if (cfg.solver == SolverKind::smps) {
      for (std::uint64_t seed : cfg.seeds) cells.push_back(Cell{n, seed});
    } else {
      cells.push_back(Cell{n, cfg.seeds.front()});
    }
  }

  std::vector<CellData> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_mutex;

  auto run_cell = [&](std::size_t index) {
    const Cell& cell = cells[index];
    Trace trace;
    switch (cfg.solver) {
      case SolverKind::mps: {
        trace = run_mps(spec, schedule_deterministic(cell.n, l_eff, m), z0);
        trace.seed = cell.seed;
        break;
      }
      case SolverKind::smps: {
        StochasticOracle oracle(
            spec, cfg.problem.noise, cfg.problem.sigma,
            RngStream(cell.seed, cell_stream_id(cell.n, cell.seed)));
        trace = run_smps(
            oracle,
            schedule_stochastic(cell.n, l_eff, m, cfg.problem.sigma, omega0),
            z0);
        break;
      }
      case SolverKind::mirror_prox: {
        trace = run_mirror_prox(spec, mp_step, cell.n, z0);
        trace.seed = cell.seed;
        break;
      }
    }
    if (options.golden) {
      for (TraceEntry& e : trace.entries) e.elapsed_seconds = 0.0;
    }

    std::vector<double> gaps, bounds;
    gaps.reserve(trace.entries.size());
    bounds.reserve(trace.entries.size());
    for (const TraceEntry& e : trace.entries) {
      gaps.push_back(sup_gap_saddle(*built.saddle, e.z_bar).sup_gap);
      if (cfg.solver == SolverKind::mirror_prox) {
        bounds.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        bounds.push_back(theoretical_bound(
            cfg.solver == SolverKind::mps ? BoundKind::deterministic
                                          : BoundKind::stochastic,
            l_eff, omega0, e.k));
      }
    }

    CellData& data = results[index];
    data.outcome.n = cell.n;
    data.outcome.seed = cell.seed;
    data.outcome.final_gap = gaps.back();
    data.outcome.bound = bounds.back();
    data.outcome.totals = trace.final_entry().counters;
    data.outcome.elapsed_seconds = trace.final_entry().elapsed_seconds;

    const std::string stem = std::string(solver_name) + "_N" +
                             std::to_string(cell.n) + "_seed" +
                             std::to_string(cell.seed);
    const std::filesystem::path dir(cfg.out_dir);
    if (cfg.emit == EmitKind::csv || cfg.emit == EmitKind::both) {
      data.outcome.csv_path = (dir / (stem + ".csv")).string();
      emit_trace_csv(trace, gaps, bounds, data.outcome.csv_path);
    }
    if (cfg.emit == EmitKind::json || cfg.emit == EmitKind::both) {
      data.outcome.json_path = (dir / (stem + ".json")).string();
      std::ofstream out(data.outcome.json_path, std::ios::binary);
      if (!out) {
        throw std::runtime_error("run_experiment: cannot open '" +
                                 data.outcome.json_path + "'");
      }
      out << trace_to_json(trace, gaps, bounds).dump(2) << '\n';
    }
  };

  const int jobs =
      std::max(1, std::min<int>(options.jobs, static_cast<int>(cells.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          const std::size_t index = next.fetch_add(1);
          if (index >= cells.size() || failed.load()) break;
          try {
            run_cell(index);
          } catch (const std::exception& e) {
            std::scoped_lock lock(failure_mutex);
            failed.store(true);
            if (failure_message.empty()) failure_message = e.what();
          }
        }
      });
    }
    for (std::thread& t : workers) t.join();
    if (failed.load()) throw std::runtime_error(failure_message);
  }

  ExperimentOutcome outcome;
  outcome.bounds_applicable = cfg.solver != SolverKind::mirror_prox;
  for (CellData& data : results) outcome.cells.push_back(data.outcome);

  // Per-N aggregation; smps averages gaps over seeds before the bound check.
  struct PerN {
    double gap_sum = 0.0;
    int count = 0;
    double bound = std::numeric_limits<double>::quiet_NaN();
    OracleCounters totals;
  };
  std::map<int, PerN> per_n;
  for (const CellOutcome& cell : outcome.cells) {
    PerN& agg = per_n[cell.n];
    agg.gap_sum += cell.final_gap;
    agg.count += 1;
    agg.bound = cell.bound;
    agg.totals = cell.totals;  // identical across seeds by construction
  }
  std::vector<std::pair<int, double>> slope_pairs;
  for (const auto& [n, agg] : per_n) {
    const double mean_gap = agg.gap_sum / agg.count;
    slope_pairs.emplace_back(n, mean_gap);
    if (outcome.bounds_applicable && !(mean_gap <= agg.bound)) {
      outcome.all_bounds_pass = false;
    }
  }
  int slope_excluded = 0;
  if (slope_pairs.size() >= 3) {
    const SlopeFit fit = fit_loglog_slope(slope_pairs);
    outcome.slope = fit.slope;
    slope_excluded = fit.excluded;
  }

  json summary;
  summary["problem"] = spec.name;
  summary["solver"] = solver_name;
  summary["l"] = l_eff;
  summary["l_floored"] = l_was_floored || spec.l_floored;
  summary["m"] = m;
  summary["sigma"] = cfg.problem.sigma;
  summary["omega"] = omega0;
  summary["golden"] = options.golden;
  if (cfg.solver == SolverKind::mirror_prox) summary["step"] = mp_step;
  json cells_json = json::array();
  for (const CellOutcome& cell : outcome.cells) {
    json c;
    c["n"] = cell.n;
    c["seed"] = cell.seed;
    c["gap"] = cell.final_gap;
    c["bound"] = std::isnan(cell.bound) ? json() : json(cell.bound);
    c["grad_g_evals"] = cell.totals.grad_g_evals;
    c["h_evals"] = cell.totals.h_evals;
    c["h_samples"] = cell.totals.h_samples;
    c["prox_solves"] = cell.totals.prox_solves;
    c["elapsed_seconds"] = options.golden ? 0.0 : cell.elapsed_seconds;
    if (!cell.csv_path.empty()) c["csv"] = cell.csv_path;
    if (!cell.json_path.empty()) c["json"] = cell.json_path;
    cells_json.push_back(std::move(c));
  }
  summary["cells"] = std::move(cells_json);
  json per_n_json = json::array();
  for (const auto& [n, agg] : per_n) {
    json row;
    row["n"] = n;
    row["mean_gap"] = agg.gap_sum / agg.count;
    row["bound"] = std::isnan(agg.bound) ? json() : json(agg.bound);
    row["pass"] = !outcome.bounds_applicable ||
                  agg.gap_sum / agg.count <= agg.bound;
    row["grad_g_evals"] = agg.totals.grad_g_evals;
    row["h_evals"] = agg.totals.h_evals;
    row["h_samples"] = agg.totals.h_samples;
    per_n_json.push_back(std::move(row));
  }
  summary["per_n"] = std::move(per_n_json);
  summary["slope"] = outcome.slope ? json(*outcome.slope) : json();
  summary["slope_pairs_excluded"] = slope_excluded;
  if (!validations.empty()) {
    json v_json = json::array();
    for (const auto& [n, report] : validations) {
      json v;
      v["n"] = n;
      v["all_pass"] = report.all_pass;
      if (report.identity_checked) {
        v["identity_worst_rel"] = report.identity_worst_rel;
      }
      json margins;
      for (const ConditionReport& c : report.conditions) {
        margins[c.name] = c.worst_margin;
      }
      v["worst_margins"] = std::move(margins);
      v_json.push_back(std::move(v));
    }
    summary["schedule_validation"] = std::move(v_json);
  }
  summary["bound_check"] = !outcome.bounds_applicable ? "not_applicable"
                           : outcome.all_bounds_pass  ? "pass"
                                                      : "fail";

  outcome.summary_path =
      (std::filesystem::path(cfg.out_dir) / "summary.json").string();
  {
    std::ofstream out(outcome.summary_path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("run_experiment: cannot open '" +
                               outcome.summary_path + "'");
    }
    out << summary.dump(2) << '\n';
  }

  outcome.exit_status =
      outcome.bounds_applicable && !outcome.all_bounds_pass ? 1 : 0;
  return outcome;
}

}  // namespace vislide
