#pragma once

#include <cstdint>

namespace vislide {

// Oracle-call counts for one run. Owned by a single run, never shared.
struct OracleCounters {
  std::uint64_t grad_g_evals = 0;
  std::uint64_t h_evals = 0;
  std::uint64_t h_samples = 0;
  std::uint64_t prox_solves = 0;

  friend bool operator==(const OracleCounters&, const OracleCounters&) =
      default;
};

}  // namespace vislide
