#include "vislide/solvers.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace vislide {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_iterate(const Point& p, const char* which, int k, int t) {
  if (p.all_finite()) return;
  throw std::runtime_error("solver abort: non-finite " + std::string(which) +
                           " at outer k=" + std::to_string(k) +
                           ", inner t=" + std::to_string(t));
}

// Shared sliding loop; `h_query` is the exact or sampled operator.
Trace run_sliding(const ProblemSpec& problem, const Schedule& schedule,
                  const Point& z0,
                  const std::function<Point(const Point&, OracleCounters&)>&
                      h_query,
                  std::string solver_name) {
  if (!problem.setup.set.member(z0)) {
    throw std::invalid_argument(solver_name + ": start point is infeasible");
  }
  const auto start = Clock::now();

  Trace trace;
  trace.solver = std::move(solver_name);
  trace.problem = problem.name;
  trace.schedule = schedule.describe();
  trace.entries.reserve(schedule.n_outer);

  OracleCounters counters;
  Point z_prev = z0;   // z_{k-1}
  Point z_bar = z0;    // z-bar_{k-1}

  for (int k = 1; k <= schedule.n_outer; ++k) {
    const double gamma = schedule.gamma_k(k);
    const double beta = schedule.beta_k(k);
    const long long t_k = schedule.inner_k(k);

    const Point z_lower = lin_comb(1.0 - gamma, z_bar, gamma, z_prev);
    const Point grad = problem.grad_g(z_lower);
    counters.grad_g_evals += 1;

    Point z_inner = z_prev;  // z_k^0 = z_{k-1}
    Point tilde_sum = Point::zeros_like(z0);
    for (long long t = 1; t <= t_k; ++t) {
      const double eta = schedule.eta_kt(k, static_cast<int>(t));

      const Point h_prev = h_query(z_inner, counters);
      const Point z_tilde = prox_map(problem.setup,
                                     lin_comb(1.0, grad, 1.0, h_prev), z_prev,
                                     z_inner, beta, eta);
      counters.prox_solves += 1;
      check_iterate(z_tilde, "prediction iterate", k, static_cast<int>(t));

      const Point h_tilde = h_query(z_tilde, counters);
      Point z_next = prox_map(problem.setup,
                              lin_comb(1.0, grad, 1.0, h_tilde), z_prev,
                              z_inner, beta, eta);
      counters.prox_solves += 1;
      check_iterate(z_next, "correction iterate", k, static_cast<int>(t));

      for (std::size_t i = 0; i < tilde_sum.dim(); ++i) {
        tilde_sum[i] += z_tilde[i];
      }
      z_inner = std::move(z_next);
    }

    Point z_tilde_avg = Point::zeros_like(z0);
    for (std::size_t i = 0; i < z_tilde_avg.dim(); ++i) {
      z_tilde_avg[i] = tilde_sum[i] / static_cast<double>(t_k);
    }
    z_prev = std::move(z_inner);  // z_k = z_k^{T_k}
    z_bar = lin_comb(1.0 - gamma, z_bar, gamma, z_tilde_avg);
    check_iterate(z_bar, "averaged iterate", k, 0);

    trace.entries.push_back(
        TraceEntry{k, z_bar, counters, seconds_since(start)});
  }
  return trace;
}

}  // namespace

Trace run_mps(const ProblemSpec& problem, const Schedule& schedule,
              const Point& z0) {
  auto exact = [&problem](const Point& z, OracleCounters& counters) {
    counters.h_evals += 1;
    return problem.h(z);
  };
  return run_sliding(problem, schedule, z0, exact, "mps");
}

Trace run_smps(StochasticOracle& oracle, const Schedule& schedule,
               const Point& z0) {
  auto sampled = [&oracle](const Point& z, OracleCounters& counters) {
    return oracle.sample(z, counters);
  };
  Trace trace =
      run_sliding(oracle.base(), schedule, z0, sampled, "smps");
  trace.seed = oracle.seed();
  return trace;
}

Trace run_mirror_prox(const ProblemSpec& problem, double step, int n_iters,
                      const Point& z0) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("run_mirror_prox: step must be > 0");
  }
  if (n_iters < 1) {
    throw std::invalid_argument("run_mirror_prox: n_iters must be >= 1");
  }
  if (!problem.setup.set.member(z0)) {
    throw std::invalid_argument("run_mirror_prox: start point is infeasible");
  }
  const auto start = Clock::now();
  const double eta = 1.0 / step;

  Trace trace;
  trace.solver = "mirror_prox";
  trace.problem = problem.name;
  trace.schedule = "mirror_prox(step=" + std::to_string(step) + ")";
  trace.entries.reserve(n_iters);

  OracleCounters counters;
  Point z = z0;
  Point avg_sum = Point::zeros_like(z0);

  for (int t = 1; t <= n_iters; ++t) {
    Point f_at_z = problem.grad_g(z);
    counters.grad_g_evals += 1;
    {
      const Point h_at_z = problem.h(z);
      counters.h_evals += 1;
      f_at_z = lin_comb(1.0, f_at_z, 1.0, h_at_z);
    }
    const Point w = prox_map(problem.setup, f_at_z, z, z, 0.0, eta);
    counters.prox_solves += 1;
    check_iterate(w, "prediction iterate", t, 1);

    Point f_at_w = problem.grad_g(w);
    counters.grad_g_evals += 1;
    {
      const Point h_at_w = problem.h(w);
      counters.h_evals += 1;
      f_at_w = lin_comb(1.0, f_at_w, 1.0, h_at_w);
    }
    Point z_next = prox_map(problem.setup, f_at_w, z, z, 0.0, eta);
    counters.prox_solves += 1;
    check_iterate(z_next, "correction iterate", t, 2);

    for (std::size_t i = 0; i < avg_sum.dim(); ++i) avg_sum[i] += w[i];
    Point z_bar = Point::zeros_like(z0);
    for (std::size_t i = 0; i < z_bar.dim(); ++i) {
      z_bar[i] = avg_sum[i] / static_cast<double>(t);
    }
    z = std::move(z_next);

    trace.entries.push_back(
        TraceEntry{t, std::move(z_bar), counters, seconds_since(start)});
  }
  return trace;
}

double default_mirror_prox_step(double l, double m) {
  return 1.0 / (std::sqrt(2.0) * (l + m));
}

}  // namespace vislide
