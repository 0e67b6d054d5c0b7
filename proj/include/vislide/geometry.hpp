#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vislide/point.hpp"

namespace vislide {

enum class ProxKind { euclidean, entropy };

enum class SetKind { box, ball, simplex, product };

// Nonempty, closed, convex, compact feasible set: a box, a ball, a standard
// simplex, or a product of those.
class FeasibleSet {
 public:
  static FeasibleSet box(std::vector<double> lo, std::vector<double> hi);
  // Uniform box [lo, hi]^dim.
  static FeasibleSet box_uniform(std::size_t dim, double lo, double hi);
  static FeasibleSet ball(std::vector<double> center, double radius);
  static FeasibleSet simplex(std::size_t dim);
  static FeasibleSet product(std::vector<FeasibleSet> parts);

  SetKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }

  bool member(const Point& p, double tol = 1e-12) const;
  Point project(const Point& p) const;

  // Prox-center: box midpoint, ball center, uniform distribution.
  Point center() const;

  // A point with one block per top-level product part (single block
  // otherwise), all coordinates from `p`.
  std::vector<Block> natural_blocks() const;

  // All extreme points if there are at most `max_count` of them, else empty.
  std::vector<Point> vertices(std::size_t max_count) const;

  const std::vector<double>& box_lo() const { return lo_; }
  const std::vector<double>& box_hi() const { return hi_; }
  const std::vector<double>& ball_center() const { return lo_; }
  double ball_radius() const { return radius_; }
  const std::vector<FeasibleSet>& parts() const { return parts_; }

  // True when the set is a simplex or a product of simplices.
  bool all_simplex() const;
  // True when the set is a box or a product of boxes.
  bool all_box() const;

  // Span-level primitives used by the prox solver (recurse over products).
  void project_span(std::span<const double> in, std::span<double> out) const;
  bool member_span(std::span<const double> p, double tol) const;

 private:
  FeasibleSet() = default;

  SetKind kind_ = SetKind::box;
  std::size_t dim_ = 0;
  std::vector<double> lo_;  // box lower bounds, or ball center
  std::vector<double> hi_;  // box upper bounds
  double radius_ = 0.0;
  std::vector<FeasibleSet> parts_;
};

// Euclidean projection of `v` onto the standard simplex (in place).
void project_simplex_span(std::span<const double> in, std::span<double> out);

enum class SimpleTermKind { zero, l1 };

// The simple convex term J: zero or a weighted l1 norm.
class SimpleTerm {
 public:
  static SimpleTerm zero() { return SimpleTerm{SimpleTermKind::zero, 0.0}; }
  static SimpleTerm l1(double weight);

  SimpleTermKind kind() const { return kind_; }
  double weight() const { return weight_; }
  double value(const Point& z) const;

 private:
  SimpleTerm(SimpleTermKind kind, double weight)
      : kind_(kind), weight_(weight) {}

  SimpleTermKind kind_;
  double weight_;
};

// Prox-function + feasible set + simple term. Construct through
// make_prox_setup, which rejects combinations without a closed-form
// composite prox step.
struct ProxSetup {
  ProxKind prox = ProxKind::euclidean;
  FeasibleSet set = FeasibleSet::box_uniform(1, 0.0, 1.0);
  SimpleTerm j = SimpleTerm::zero();
};

// Validates the (prox, set, J) combination; throws std::invalid_argument on
// unsupported combinations so solve-time calls never fail.
ProxSetup make_prox_setup(ProxKind prox, FeasibleSet set,
                          SimpleTerm j = SimpleTerm::zero());

// V(z, u): 1/2 ||z-u||^2 for the Euclidean kind; blockwise
// sum_i u_i log(u_i / z_i) for the entropy kind. Entropy requires z > 0.
double bregman(const ProxSetup& setup, const Point& z, const Point& u);

// argmin_z <g, z> + J(z) + beta V(z0, z) + eta V(z1, z) over the set.
// Solved by collapsing the two Bregman terms into one at the dual-average
// center, then a single closed-form composite step.
Point prox_map(const ProxSetup& setup, const Point& g, const Point& z0,
               const Point& z1, double beta, double eta);

// Max over a deterministic probe set of the first-order optimality
// violation at `candidate`, clipped below at 0. Near 0 at the minimizer.
double prox_optimality_residual(const ProxSetup& setup, const Point& g,
                                const Point& z0, const Point& z1, double beta,
                                double eta, const Point& candidate);

// Omega_{z0} = sup_{z in set} V(z0, z), in closed form.
double omega(const ProxSetup& setup, const Point& z0);

// The norm paired with the setup's prox kind: l2 for Euclidean; for entropy,
// the l1 norms of the simplex blocks combined in quadrature (plain l1 on a
// single simplex).
double setup_norm(const ProxSetup& setup, const Point& d);
// Its dual: l2, or blockwise max-norm combined in quadrature.
double setup_dual_norm(const ProxSetup& setup, const Point& d);

}  // namespace vislide
