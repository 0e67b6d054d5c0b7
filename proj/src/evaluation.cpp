#include "vislide/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vislide/rng.hpp"

namespace vislide {

double gap_q(const ProblemSpec& problem, const Point& z_tilde,
             const Point& z) {
  if (!problem.setup.set.member(z_tilde) || !problem.setup.set.member(z)) {
    throw std::invalid_argument("gap_q: both points must be feasible");
  }
  const Point h_at_z = problem.h(z);
  return problem.g_value(z_tilde) - problem.g_value(z) +
         dual_pairing(h_at_z, diff(z_tilde, z)) + problem.j.value(z_tilde) -
         problem.j.value(z);
}

namespace {

// sup over a box/simplex block of sum_i c_i v_i - (w_i/2)(v_i - a_i)^2.
// Returns the block maximizer and adds the value to `acc`.
void maximize_block(const FeasibleSet& set, std::span<const double> c,
                    std::span<const double> weights,
                    std::span<const double> targets, std::span<double> argmax,
                    CompensatedAccumulator& acc, bool& used_clamp) {
  switch (set.kind()) {
    case SetKind::box: {
      for (std::size_t i = 0; i < set.dim(); ++i) {
        const double lo = set.box_lo()[i], hi = set.box_hi()[i];
        double v;
        if (weights[i] > 0.0) {
          v = std::clamp(targets[i] + c[i] / weights[i], lo, hi);
          used_clamp = true;
        } else {
          v = c[i] >= 0.0 ? hi : lo;
        }
        const double d = v - targets[i];
        acc.add(c[i] * v - 0.5 * weights[i] * d * d);
        argmax[i] = v;
      }
      return;
    }
    case SetKind::simplex: {
      for (std::size_t i = 0; i < set.dim(); ++i) {
        if (weights[i] != 0.0) {
          throw std::invalid_argument(
              "sup_gap_saddle: quadratic weights over a simplex block have "
              "no closed form; use sup_gap_ascent");
        }
      }
      std::size_t best = 0;
      for (std::size_t i = 1; i < set.dim(); ++i) {
        if (c[i] > c[best]) best = i;
      }
      std::fill(argmax.begin(), argmax.end(), 0.0);
      argmax[best] = 1.0;
      acc.add(c[best]);
      return;
    }
    default:
      throw std::invalid_argument(
          "sup_gap_saddle: blocks must be boxes or simplices; use "
          "sup_gap_ascent");
  }
}

}  // namespace

GapReport sup_gap_saddle(const SaddleProblem& sp, const Point& z_tilde) {
  const std::size_t n = sp.k.cols, m = sp.k.rows;
  if (z_tilde.dim() != n + m) {
    throw std::invalid_argument("sup_gap_saddle: dimension mismatch");
  }
  std::span<const double> x_tilde{z_tilde.values().data(), n};
  std::span<const double> y_tilde{z_tilde.values().data() + n, m};

  // sup_y L(x~, y): f(x~) + sup_y [<K x~, y> - g(y)].
  std::vector<double> kx(m);
  sp.k.apply(x_tilde, kx);
  CompensatedAccumulator upper;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x_tilde[i] - sp.fx_targets[i];
    upper.add(0.5 * sp.fx_weights[i] * d * d);
  }
  Point argmax = Point::zeros(n + m);
  bool used_clamp = false;
  maximize_block(sp.y_set, kx, sp.gy_weights, sp.gy_targets,
                 {argmax.values().data() + n, m}, upper, used_clamp);

  // inf_x L(x, y~): inf_x [f(x) + <K x, y~>] - g(y~). Negate to reuse the
  // block maximizer: inf f + <d, x> = -sup <-d, x> - f.
  std::vector<double> kty(n);
  sp.k.apply_transpose(y_tilde, kty);
  for (double& v : kty) v = -v;
  CompensatedAccumulator lower_neg;  // accumulates -inf_x [...]
  maximize_block(sp.x_set, kty, sp.fx_weights, sp.fx_targets,
                 {argmax.values().data(), n}, lower_neg, used_clamp);
  // Shift by the constant part of -f: maximize_block maximized
  // <-d, x> - f(x); so lower_neg.total() = -inf_x [f(x) + <d, x>].
  CompensatedAccumulator g_at_tilde;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = y_tilde[i] - sp.gy_targets[i];
    g_at_tilde.add(0.5 * sp.gy_weights[i] * d * d);
  }

  const double sup_y_part = upper.total();
  const double inf_x_part = -lower_neg.total() - g_at_tilde.total();
  GapReport report;
  report.sup_gap = std::max(0.0, sup_y_part - inf_x_part);
  report.method = used_clamp ? GapMethod::closed_form_saddle
                             : GapMethod::vertex_enumeration;
  report.certified = true;
  report.argmax_z = Point(std::move(argmax.values()),
                          {Block{0, n}, Block{n, m}});
  return report;
}

GapReport sup_gap_ascent(const ProblemSpec& problem, const Point& z_tilde,
                         int iters, int restarts) {
  if (iters < 1 || restarts < 1) {
    throw std::invalid_argument("sup_gap_ascent: iters, restarts must be >= 1");
  }
  if (!problem.h_jacobian_t) {
    throw std::invalid_argument(
        "sup_gap_ascent: needs the affine-H Jacobian action");
  }
  const double step =
      1.0 / std::max(problem.lipschitz_l + problem.lipschitz_m, 1e-12);
  const FeasibleSet& set = problem.setup.set;

  GapReport report;
  report.method = GapMethod::projected_ascent;
  report.certified = false;
  // z = z~ is always a valid probe and pins the value at >= 0.
  report.sup_gap = 0.0;
  report.argmax_z = z_tilde;

  RngStream rng(0xA5CE17ULL, 3);
  std::vector<Point> starts;
  starts.push_back(set.center());
  for (int r = 1; r < restarts; ++r) {
    Point raw = Point::zeros_like(z_tilde);
    for (std::size_t i = 0; i < raw.dim(); ++i) raw[i] = rng.uniform(-1.0, 2.0);
    starts.push_back(set.project(raw));
  }

  for (const Point& start : starts) {
    Point z = start;
    for (int it = 0; it < iters; ++it) {
      // d/dz Q(z~, z) = -grad G(z) + (dH)^T (z~ - z) - H(z), plus the J
      // term handled proximally.
      const Point grad_g = problem.grad_g(z);
      const Point jt = problem.h_jacobian_t(diff(z_tilde, z));
      const Point h_at_z = problem.h(z);
      Point moved = Point::zeros_like(z);
      for (std::size_t i = 0; i < z.dim(); ++i) {
        moved[i] = z[i] + step * (-grad_g[i] + jt[i] - h_at_z[i]);
      }
      if (problem.j.kind() == SimpleTermKind::l1) {
        const double tau = step * problem.j.weight();
        for (double& v : moved.values()) {
          if (v > tau) {
            v -= tau;
          } else if (v < -tau) {
            v += tau;
          } else {
            v = 0.0;
          }
        }
      }
      z = set.project(moved);
    }
    const double value = gap_q(problem, z_tilde, z);
    if (value > report.sup_gap) {
      report.sup_gap = value;
      report.argmax_z = z;
    }
  }
  return report;
}

double theoretical_bound(BoundKind kind, double l, double omega0, int n) {
  if (!(l > 0.0) || !(omega0 > 0.0) || n < 1) {
    throw std::invalid_argument(
        "theoretical_bound: need L > 0, omega > 0, n >= 1");
  }
  const double constant = kind == BoundKind::deterministic ? 6.0 : 19.0;
  return constant * l * omega0 / (static_cast<double>(n) * n);
}

SlopeFit fit_loglog_slope(std::span<const std::pair<int, double>> pairs) {
  if (pairs.size() < 3) {
    throw std::invalid_argument("fit_loglog_slope: need at least 3 pairs");
  }
  std::vector<double> xs, ys;
  SlopeFit fit;
  for (const auto& [n, gap] : pairs) {
    if (!(gap > 0.0)) {
      ++fit.excluded;
      continue;
    }
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(gap));
  }
  fit.used = static_cast<int>(xs.size());
  if (fit.used < 2) {
    throw std::invalid_argument(
        "fit_loglog_slope: fewer than 2 positive-gap pairs remain");
  }
  double mean_x = 0.0, mean_y = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= fit.used;
  mean_y /= fit.used;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  return fit;
}

}  // namespace vislide
