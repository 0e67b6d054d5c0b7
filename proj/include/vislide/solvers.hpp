#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vislide/counters.hpp"
#include "vislide/point.hpp"
#include "vislide/problems.hpp"
#include "vislide/schedule.hpp"

namespace vislide {

struct TraceEntry {
  int k = 0;              // outer iteration (or baseline iteration)
  Point z_bar;            // averaged iterate published at k
  OracleCounters counters;  // cumulative snapshot
  double elapsed_seconds = 0.0;
};

struct Trace {
  std::vector<TraceEntry> entries;
  std::string solver;
  std::string problem;
  std::string schedule;
  std::uint64_t seed = 0;

  const TraceEntry& final_entry() const { return entries.back(); }
};

// Mirror-prox sliding: one gradient per outer iteration, T_k prox pairs in
// the inner loop, both inner Bregman terms centered as produced by the
// schedule. Deterministic: identical inputs give bit-identical traces.
Trace run_mps(const ProblemSpec& problem, const Schedule& schedule,
              const Point& z0);

// Stochastic variant: each H evaluation becomes one fresh oracle sample
// (two per inner step). With sigma = 0 the trace matches run_mps exactly.
Trace run_smps(StochasticOracle& oracle, const Schedule& schedule,
               const Point& z0);

// Classic extragradient baseline on F = grad G + H; outputs the running
// average of the prediction steps.
Trace run_mirror_prox(const ProblemSpec& problem, double step, int n_iters,
                      const Point& z0);

// 1 / (sqrt(2) (L + M)).
double default_mirror_prox_step(double l, double m);

}  // namespace vislide
