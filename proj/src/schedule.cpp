#include "vislide/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vislide {

namespace {

// Integer ceiling with a relative guard so a value that is an integer up to
// rounding noise does not spill to the next one.
long long guarded_ceil(double x) {
  const double guard = 1e-12 * std::max(1.0, std::abs(x));
  const double c = std::ceil(x - guard);
  return static_cast<long long>(c);
}

void fill_gamma_beta(Schedule& s, double l) {
  s.gamma.resize(s.n_outer);
  s.beta.resize(s.n_outer);
  s.gamma_cap.resize(s.n_outer);
  for (int k = 1; k <= s.n_outer; ++k) {
    s.gamma[k - 1] = 2.0 / (k + 1.0);
    s.beta[k - 1] = 2.0 * l / k;
    s.gamma_cap[k - 1] = k == 1 ? 1.0
                                : (1.0 - s.gamma[k - 1]) * s.gamma_cap[k - 2];
  }
}

}  // namespace

long long Schedule::total_inner() const {
  long long total = 0;
  for (long long t : inner) total += t;
  return total;
}

std::string Schedule::describe() const {
  std::ostringstream out;
  switch (origin) {
    case Origin::deterministic_sliding:
      out << "sliding(N=" << n_outer << ",L=" << l << ",M=" << m << ")";
      break;
    case Origin::stochastic_sliding:
      out << "sliding_stochastic(N=" << n_outer << ",L=" << l << ",M=" << m
          << ",sigma=" << sigma << ",omega=" << omega0 << ")";
      break;
    case Origin::custom:
      out << "custom(N=" << n_outer << ")";
      break;
  }
  return out.str();
}

Schedule schedule_deterministic(int n_outer, double l, double m) {
  if (n_outer < 1) {
    throw std::invalid_argument("schedule_deterministic: n_outer must be >= 1");
  }
  if (!(l > 0.0)) {
    throw std::invalid_argument(
        "schedule_deterministic: L must be > 0; floor L (e.g. at 1e-12*M) "
        "before building the schedule");
  }
  if (m < 0.0) {
    throw std::invalid_argument("schedule_deterministic: M must be >= 0");
  }
  Schedule s;
  s.n_outer = n_outer;
  s.origin = Schedule::Origin::deterministic_sliding;
  s.l = l;
  s.m = m;
  fill_gamma_beta(s, l);
  s.inner.resize(n_outer);
  for (int k = 1; k <= n_outer; ++k) {
    s.inner[k - 1] = std::max<long long>(1, guarded_ceil(k * m / l));
  }
  s.eta = [l, beta = s.beta, inner = s.inner](int k, int t) {
    return beta[k - 1] * (t - 1) +
           l * static_cast<double>(inner[k - 1]) / static_cast<double>(k);
  };
  return s;
}

Schedule schedule_stochastic(int n_outer, double l, double m, double sigma,
                             double omega0) {
  if (n_outer < 1) {
    throw std::invalid_argument("schedule_stochastic: n_outer must be >= 1");
  }
  if (!(l > 0.0)) {
    throw std::invalid_argument("schedule_stochastic: L must be > 0");
  }
  if (m < 0.0 || sigma < 0.0) {
    throw std::invalid_argument("schedule_stochastic: need M >= 0, sigma >= 0");
  }
  if (!(omega0 > 0.0)) {
    throw std::invalid_argument("schedule_stochastic: omega must be > 0");
  }
  Schedule s;
  s.n_outer = n_outer;
  s.origin = Schedule::Origin::stochastic_sliding;
  s.l = l;
  s.m = m;
  s.sigma = sigma;
  s.omega0 = omega0;
  fill_gamma_beta(s, l);
  s.inner.resize(n_outer);
  const double n = n_outer;
  for (int k = 1; k <= n_outer; ++k) {
    const double raw = std::sqrt(3.0) * k * m / l +
                       n * static_cast<double>(k) * k * sigma * sigma /
                           (omega0 * l * l);
    s.inner[k - 1] = std::max<long long>(1, guarded_ceil(raw));
  }
  s.eta = [l, beta = s.beta, inner = s.inner](int k, int t) {
    return beta[k - 1] * (t - 1) +
           l * static_cast<double>(inner[k - 1]) / static_cast<double>(k);
  };
  return s;
}

const ConditionReport* ValidationReport::find(const std::string& name) const {
  for (const ConditionReport& c : conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

class ConditionTracker {
 public:
  explicit ConditionTracker(std::string name) { report_.name = std::move(name); }

  // margin >= -tol passes; the most negative margin is retained.
  void observe(double margin, double tol, int k, int t) {
    if (first_ || margin < report_.worst_margin) {
      report_.worst_margin = margin;
      report_.worst_k = k;
      report_.worst_t = t;
      first_ = false;
    }
    if (margin < -tol) {
      report_.pass = false;
      ++report_.violations;
    }
  }

  ConditionReport take() {
    if (first_) report_.worst_margin = 0.0;
    return report_;
  }

 private:
  ConditionReport report_;
  bool first_ = true;
};

}  // namespace

ValidationReport validate_schedule(const Schedule& s, double l, double m,
                                   ValidationMode mode) {
  constexpr double kRelTol = 1e-9;
  ValidationReport report;

  ConditionTracker cond_etaM(mode == ValidationMode::stochastic
                                 ? "cond_etaM_S"
                                 : "cond_etaM");
  ConditionTracker cond_etabeta("cond_etabeta");
  ConditionTracker cond_gamma("cond_gamma");
  ConditionTracker cond_beta_l("cond_beta_lgamma");
  ConditionTracker cond_cross("cond_cross_iteration");
  ConditionTracker gamma_recursion("gamma_cap_recursion");

  const double etaM_factor =
      mode == ValidationMode::stochastic ? 1.0 / 3.0 : 1.0;

  for (int k = 1; k <= s.n_outer; ++k) {
    const double gamma = s.gamma_k(k);
    const double beta = s.beta_k(k);
    const long long t_k = s.inner_k(k);

    if (k == 1) {
      cond_gamma.observe(-std::abs(gamma - 1.0), kRelTol, k, 0);
    } else {
      cond_gamma.observe(std::min(gamma, 1.0 - gamma), kRelTol, k, 0);
    }
    cond_beta_l.observe(beta - l * gamma, kRelTol * std::abs(beta), k, 0);

    const double expected_cap =
        k == 1 ? 1.0 : (1.0 - gamma) * s.gamma_cap_k(k - 1);
    gamma_recursion.observe(-std::abs(s.gamma_cap_k(k) - expected_cap),
                            kRelTol * expected_cap, k, 0);

    double prev_eta = 0.0;
    for (long long t = 1; t <= t_k; ++t) {
      const double eta = s.eta_kt(k, static_cast<int>(t));
      const double bound = std::sqrt(etaM_factor * (beta + eta) * eta);
      cond_etaM.observe(bound - m, kRelTol * std::max(m, 1.0), k,
                        static_cast<int>(t));
      if (t >= 2) {
        cond_etabeta.observe(beta + prev_eta - eta,
                             kRelTol * std::max(std::abs(eta), 1.0), k,
                             static_cast<int>(t));
      }
      prev_eta = eta;
    }

    if (k >= 2) {
      const double lhs = s.gamma_k(k) / s.gamma_cap_k(k) *
                         (beta + s.eta_kt(k, 1) / static_cast<double>(t_k));
      const long long t_prev = s.inner_k(k - 1);
      const double rhs =
          s.gamma_k(k - 1) *
          (s.beta_k(k - 1) + s.eta_kt(k - 1, static_cast<int>(t_prev))) /
          (s.gamma_cap_k(k - 1) * static_cast<double>(t_prev));
      cond_cross.observe(rhs - lhs, kRelTol * std::max(std::abs(rhs), 1.0), k,
                         0);
    }
  }

  report.conditions.push_back(cond_etaM.take());
  report.conditions.push_back(cond_etabeta.take());
  report.conditions.push_back(cond_gamma.take());
  report.conditions.push_back(cond_beta_l.take());
  report.conditions.push_back(cond_cross.take());
  report.conditions.push_back(gamma_recursion.take());

  // Corollary-style schedules satisfy
  // (gamma_k / Gamma_k)(beta_k + eta_k^1 / T_k) = 3L identically.
  if (s.origin != Schedule::Origin::custom) {
    report.identity_checked = true;
    double worst = 0.0;
    for (int k = 1; k <= s.n_outer; ++k) {
      const double value =
          s.gamma_k(k) / s.gamma_cap_k(k) *
          (s.beta_k(k) + s.eta_kt(k, 1) / static_cast<double>(s.inner_k(k)));
      worst = std::max(worst, std::abs(value - 3.0 * l) / (3.0 * l));
    }
    report.identity_worst_rel = worst;
  }

  for (const ConditionReport& c : report.conditions) {
    if (!c.pass) {
      report.all_pass = false;
      if (report.first_failure.empty()) {
        report.first_failure = c.name + " at k=" + std::to_string(c.worst_k) +
                               ",t=" + std::to_string(c.worst_t);
      }
    }
  }
  return report;
}

}  // namespace vislide
