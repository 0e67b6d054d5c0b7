#pragma once

#include <functional>
#include <string>
#include <vector>

namespace vislide {

// Per-iteration parameters of the sliding methods. Outer index k and inner
// index t are 1-based throughout.
struct Schedule {
  enum class Origin { custom, deterministic_sliding, stochastic_sliding };

  int n_outer = 0;
  std::vector<double> gamma;      // gamma_k, [k-1]
  std::vector<double> beta;       // beta_k
  std::vector<long long> inner;   // T_k
  std::vector<double> gamma_cap;  // Gamma_k via the defining recursion
  std::function<double(int k, int t)> eta;

  Origin origin = Origin::custom;
  // Parameters the schedule was generated from (zero when custom).
  double l = 0.0, m = 0.0, sigma = 0.0, omega0 = 0.0;

  double gamma_k(int k) const { return gamma[k - 1]; }
  double beta_k(int k) const { return beta[k - 1]; }
  long long inner_k(int k) const { return inner[k - 1]; }
  double gamma_cap_k(int k) const { return gamma_cap[k - 1]; }
  double eta_kt(int k, int t) const { return eta(k, t); }

  long long total_inner() const;
  std::string describe() const;
};

// gamma_k = 2/(k+1), beta_k = 2L/k, T_k = ceil(kM/L),
// eta_k^t = beta_k (t-1) + L T_k / k. Throws if L <= 0 (callers floor L).
Schedule schedule_deterministic(int n_outer, double l, double m);

// Same shape with T_k = ceil(sqrt(3) kM/L + N k^2 sigma^2 / (Omega L^2)).
// N is n_outer, fixed upfront.
Schedule schedule_stochastic(int n_outer, double l, double m, double sigma,
                             double omega0);

enum class ValidationMode { deterministic, stochastic };

struct ConditionReport {
  std::string name;
  bool pass = true;
  double worst_margin = 0.0;  // >= 0 means satisfied; most negative kept
  int worst_k = 0;
  int worst_t = 0;
  long long violations = 0;
};

struct ValidationReport {
  bool all_pass = true;
  std::vector<ConditionReport> conditions;
  // For Corollary-style schedules: worst relative deviation of
  // (gamma_k / Gamma_k)(beta_k + eta_k^1 / T_k) from 3L.
  bool identity_checked = false;
  double identity_worst_rel = 0.0;
  std::string first_failure;  // e.g. "cond_etaM at k=3,t=1"

  const ConditionReport* find(const std::string& name) const;
};

// Checks the step-size conditions (cond_etaM / cond_etabeta) and the
// convergence conditions (gamma_1 = 1, gamma_k in [0,1], beta_k >= L gamma_k,
// and the cross-iteration inequality). Stochastic mode strengthens the
// cond_etaM bound by the 1/3 factor. Report-only; never throws.
ValidationReport validate_schedule(const Schedule& s, double l, double m,
                                   ValidationMode mode);

}  // namespace vislide
