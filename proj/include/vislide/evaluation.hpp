#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "vislide/point.hpp"
#include "vislide/problems.hpp"

namespace vislide {

// Q(z~, z) = G(z~) - G(z) + <H(z), z~ - z> + J(z~) - J(z).
// Throws std::invalid_argument if either point is infeasible.
double gap_q(const ProblemSpec& problem, const Point& z_tilde, const Point& z);

enum class GapMethod { closed_form_saddle, vertex_enumeration, projected_ascent };

struct GapReport {
  double sup_gap = 0.0;
  std::optional<Point> argmax_z;
  GapMethod method = GapMethod::closed_form_saddle;
  bool certified = false;
};

// Certified sup_z Q(z~, z) for saddle structure: equals the primal-dual gap
// sup_y L(x~, y) - inf_x L(x, y~). Diagonal quadratics over boxes are
// clamped coordinate-wise; simplex blocks must carry zero weights and are
// optimized over vertices. Throws on unsupported structure.
GapReport sup_gap_saddle(const SaddleProblem& sp, const Point& z_tilde);

// Uncertified fallback: projected (proximal) gradient ascent on the concave
// map z -> Q(z~, z), step 1/(L+M), multi-started from the set center and
// random feasible points. Requires affine H (h_jacobian_t present).
GapReport sup_gap_ascent(const ProblemSpec& problem, const Point& z_tilde,
                         int iters, int restarts);

enum class BoundKind { deterministic, stochastic };

// 6 L Omega / n^2, or 19 L Omega / n^2 for the stochastic kind.
double theoretical_bound(BoundKind kind, double l, double omega0, int n);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  int used = 0;
  int excluded = 0;  // nonpositive-gap pairs dropped
};

// Least-squares slope of log(gap) against log(n).
SlopeFit fit_loglog_slope(std::span<const std::pair<int, double>> pairs);

}  // namespace vislide
