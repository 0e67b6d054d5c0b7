#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vislide/problems.hpp"

namespace vislide {

// Configuration / usage problem; the CLI maps this to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IniValue {
  std::string text;
  int line = 0;
};

// section -> key -> value. `#` starts a comment; keys are `key = value`.
struct IniFile {
  std::map<std::string, std::map<std::string, IniValue>> sections;

  bool has(const std::string& section, const std::string& key) const;
  const IniValue& require(const std::string& section,
                          const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
};

// Parses INI text; errors carry line and column.
IniFile parse_ini(const std::string& text, const std::string& origin);

enum class ProblemFamily { saddle, matrix_game };
enum class SolverKind { mps, smps, mirror_prox };
enum class EmitKind { csv, json, both };

struct SetConfig {
  SetKind kind = SetKind::box;
  double lo = 0.0, hi = 1.0;  // box bounds
  double radius = 1.0;        // ball
};

struct ProblemConfig {
  ProblemFamily family = ProblemFamily::saddle;
  std::size_t m = 0, n = 0;
  // K source: inline rows, or seeded uniform[-1,1].
  std::optional<std::vector<std::vector<double>>> k_rows;
  std::uint64_t k_seed = 0;
  std::optional<double> k_scale_to;  // rescale so ||K||_2 equals this
  std::vector<double> fx_weights, fx_targets, gy_weights, gy_targets;
  SetConfig x_set, y_set;
  ProxKind prox = ProxKind::euclidean;
  SimpleTerm j = SimpleTerm::zero();
  double sigma = 0.0;
  NoiseKind noise = NoiseKind::gaussian_additive;
};

struct ExperimentConfig {
  ProblemConfig problem;
  SolverKind solver = SolverKind::mps;
  std::optional<double> mirror_prox_step;
  std::vector<int> sweep;            // strictly increasing N values
  std::vector<std::uint64_t> seeds;  // >= 1 entry
  std::string out_dir = "out";
  EmitKind emit = EmitKind::csv;
};

ExperimentConfig parse_experiment_config(const IniFile& ini);
ExperimentConfig load_experiment_config(const std::string& path);

struct BuiltProblem {
  ProblemSpec spec;
  std::optional<SaddleProblem> saddle;
};

BuiltProblem build_problem(const ProblemConfig& cfg);

}  // namespace vislide
