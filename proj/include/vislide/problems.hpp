#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vislide/counters.hpp"
#include "vislide/geometry.hpp"
#include "vislide/point.hpp"
#include "vislide/rng.hpp"

namespace vislide {

// Dense row-major matrix, desk scale.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  // out = K x
  void apply(std::span<const double> x, std::span<double> out) const;
  // out = K^T y
  void apply_transpose(std::span<const double> y, std::span<double> out) const;

  void scale(double c);
};

// Spectral norm ||K||_2 via power iteration on K^T K with a fixed seeded
// start vector. Throws std::runtime_error (reporting the last estimate) if
// 10^4 iterations do not converge to relative `tol`. With
// `certified_upper`, the estimate is inflated by (1 + tol).
double estimate_operator_norm(const Matrix& k, double tol,
                              bool certified_upper = false);

// Evaluators and constants for VI(Z; G, H, J).
struct ProblemSpec {
  std::size_t dim = 0;
  std::vector<Block> blocks;
  std::function<double(const Point&)> g_value;
  std::function<Point(const Point&)> grad_g;
  std::function<Point(const Point&)> h;
  // v -> (dH)^T v for affine H; empty when unavailable.
  std::function<Point(const Point&)> h_jacobian_t;
  SimpleTerm j = SimpleTerm::zero();
  ProxSetup setup;
  double lipschitz_l = 0.0;
  double lipschitz_m = 0.0;
  bool l_floored = false;
  std::string name;

  Point shaped(std::vector<double> values) const {
    return Point(std::move(values), blocks);
  }
};

// min_x max_y f(x) + <Kx, y> - g(y) with diagonal quadratics
// f(x) = sum_i (w_i/2)(x_i - a_i)^2 (g likewise), reduced to
// VI(Z; G, H, 0) with G(z) = f(x) + g(y) and H(z) = (K^T y, -K x).
struct SaddleProblem {
  Matrix k;  // m x n, x in R^n, y in R^m
  std::vector<double> fx_weights, fx_targets;
  std::vector<double> gy_weights, gy_targets;
  FeasibleSet x_set = FeasibleSet::box_uniform(1, 0.0, 1.0);
  FeasibleSet y_set = FeasibleSet::box_uniform(1, 0.0, 1.0);
};

struct SaddleBuild {
  ProblemSpec spec;
  SaddleProblem saddle;
};

SaddleBuild build_saddle_problem(Matrix k, std::vector<double> fx_weights,
                                 std::vector<double> fx_targets,
                                 std::vector<double> gy_weights,
                                 std::vector<double> gy_targets, FeasibleSet x,
                                 FeasibleSet y, ProxKind setup_kind,
                                 SimpleTerm j = SimpleTerm::zero());

// f = g = 0 over a product of simplices with entropy prox. G vanishes, so
// the stored L is floored at 1e-12 * M to keep the sliding schedule
// well-defined; `l_floored` records that.
SaddleBuild build_matrix_game(Matrix k);

enum class NoiseKind { gaussian_additive, coordinate_sparsified };

// Unbiased sampler of H with variance at most sigma^2 in the dual norm.
class StochasticOracle {
 public:
  StochasticOracle(ProblemSpec base, NoiseKind noise_kind, double sigma,
                   RngStream rng);

  Point sample(const Point& z, OracleCounters& counters);

  const ProblemSpec& base() const { return base_; }
  double sigma() const { return sigma_; }
  NoiseKind noise_kind() const { return noise_kind_; }
  std::uint64_t seed() const { return rng_.seed(); }
  std::uint64_t stream_id() const { return rng_.stream_id(); }

 private:
  ProblemSpec base_;
  NoiseKind noise_kind_;
  double sigma_;
  RngStream rng_;
};

inline Point sample_h(StochasticOracle& oracle, const Point& z,
                      OracleCounters& counters) {
  return oracle.sample(z, counters);
}

// Built-in instances.

// 20x20 saddle problem: K ~ uniform[-1,1] from stream (7, 0) scaled so
// ||K||_2 = 2, quadratic weights 4 (targets 0.25 / 0.75), boxes [0,1]^20,
// Euclidean prox. L = 4, M = 2, Omega from the box centers = 5.
SaddleBuild reference_saddle();

// Rock-paper-scissors matrix game on two 3-simplices, entropy prox.
SaddleBuild rps_game();

// 1-D quadratic: G(z) = z^2 on [-1, 1], H = 0, Euclidean prox. L = 2.
ProblemSpec quadratic_1d();

}  // namespace vislide
