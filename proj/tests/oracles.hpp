// Test-only reference implementations, kept independent of the library
// paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "vislide/geometry.hpp"
#include "vislide/point.hpp"

namespace vislide::testing {

// Extended-precision dot product.
inline long double pairing_oracle(const Point& a, const Point& b) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    acc += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
  }
  return acc;
}

// Objective of the composite prox subproblem, evaluated directly from the
// definition (linear term + J + two Bregman distances).
inline double prox_objective(const ProxSetup& setup, const Point& g,
                             const Point& z0, const Point& z1, double beta,
                             double eta, const Point& z) {
  return dual_pairing(g, z) + setup.j.value(z) + beta * bregman(setup, z0, z) +
         eta * bregman(setup, z1, z);
}

// Brute-force minimizer of the prox subproblem by projected gradient with
// Armijo backtracking, Euclidean projections throughout. Independent of the
// closed-form prox path.
inline Point prox_bruteforce(const ProxSetup& setup, const Point& g,
                             const Point& z0, const Point& z1, double beta,
                             double eta, int iters = 4000) {
  const double rho = beta + eta;
  const auto grad_at = [&](const Point& z) {
    Point out = Point::zeros_like(z);
    for (std::size_t i = 0; i < z.dim(); ++i) {
      double dV0, dV1;
      if (setup.prox == ProxKind::euclidean) {
        dV0 = z[i] - z0[i];
        dV1 = z[i] - z1[i];
      } else {
        const double zi = std::max(z[i], 1e-16);
        dV0 = std::log(zi) + 1.0 - (std::log(z0[i]) + 1.0);
        dV1 = std::log(zi) + 1.0 - (std::log(z1[i]) + 1.0);
      }
      out[i] = g[i] + beta * dV0 + eta * dV1;
    }
    return out;
  };
  // J handled by subgradient-free proximal step on boxes (soft threshold).
  const bool has_l1 = setup.j.kind() == SimpleTermKind::l1;

  Point z = setup.set.project(setup.set.center());
  double fz = prox_objective(setup, g, z0, z1, beta, eta, z);
  double step = 1.0 / rho;
  for (int it = 0; it < iters; ++it) {
    const Point grad = grad_at(z);
    bool moved = false;
    for (int back = 0; back < 40; ++back) {
      Point candidate = Point::zeros_like(z);
      for (std::size_t i = 0; i < z.dim(); ++i) {
        candidate[i] = z[i] - step * grad[i];
      }
      if (has_l1) {
        const double tau = step * setup.j.weight();
        for (double& v : candidate.values()) {
          if (v > tau) {
            v -= tau;
          } else if (v < -tau) {
            v += tau;
          } else {
            v = 0.0;
          }
        }
      }
      candidate = setup.set.project(candidate);
      const double fc = prox_objective(setup, g, z0, z1, beta, eta, candidate);
      if (fc <= fz) {
        z = std::move(candidate);
        fz = fc;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    step = std::min(step * 2.0, 1e6 / rho);
  }
  return z;
}

// Exhaustive minimizer over a 2-D box on a fine grid plus local refinement.
inline Point grid_minimize_2d(const ProxSetup& setup, const Point& g,
                              const Point& z0, const Point& z1, double beta,
                              double eta) {
  const double lo0 = setup.set.box_lo()[0], hi0 = setup.set.box_hi()[0];
  const double lo1 = setup.set.box_lo()[1], hi1 = setup.set.box_hi()[1];
  double best0 = lo0, best1 = lo1;
  double best = 1e300;
  const auto value = [&](double a, double b) {
    return prox_objective(setup, g, z0, z1, beta, eta,
                          Point(std::vector<double>{a, b}));
  };
  const int steps = 1000;  // grid step 1e-3 on a unit box
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      const double a = lo0 + (hi0 - lo0) * i / steps;
      const double b = lo1 + (hi1 - lo1) * j / steps;
      const double v = value(a, b);
      if (v < best) {
        best = v;
        best0 = a;
        best1 = b;
      }
    }
  }
  double span0 = (hi0 - lo0) / steps, span1 = (hi1 - lo1) / steps;
  for (int level = 0; level < 12; ++level) {
    const double a0 = best0, b0 = best1;
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) {
        const double a = std::clamp(a0 + span0 * i / 10.0, lo0, hi0);
        const double b = std::clamp(b0 + span1 * j / 10.0, lo1, hi1);
        const double v = value(a, b);
        if (v < best) {
          best = v;
          best0 = a;
          best1 = b;
        }
      }
    }
    span0 /= 8.0;
    span1 /= 8.0;
  }
  return Point(std::vector<double>{best0, best1});
}

}  // namespace vislide::testing
