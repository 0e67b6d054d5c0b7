#include "vislide/problems.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace vislide {

void Matrix::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < rows; ++i) {
    CompensatedAccumulator acc;
    const double* row = data.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) acc.add(row[j] * x[j]);
    out[i] = acc.total();
  }
}

void Matrix::apply_transpose(std::span<const double> y,
                             std::span<double> out) const {
  std::vector<CompensatedAccumulator> acc(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = data.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) acc[j].add(row[j] * y[i]);
  }
  for (std::size_t j = 0; j < cols; ++j) out[j] = acc[j].total();
}

void Matrix::scale(double c) {
  for (double& v : data) v *= c;
}

double estimate_operator_norm(const Matrix& k, double tol,
                              bool certified_upper) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("estimate_operator_norm: tol must be > 0");
  }
  if (k.rows == 0 || k.cols == 0) return 0.0;

  RngStream rng(0x0907E12A11CE55ULL, 1);
  std::vector<double> v(k.cols), kv(k.rows), ktkv(k.cols);
  double vnorm2 = 0.0;
  for (double& vi : v) {
    vi = rng.uniform(-1.0, 1.0);
    vnorm2 += vi * vi;
  }
  for (double& vi : v) vi /= std::sqrt(vnorm2);

  double lambda = 0.0;
  constexpr int kMaxIters = 10000;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    k.apply(v, kv);
    k.apply_transpose(kv, ktkv);
    double rayleigh = 0.0, next_norm2 = 0.0;
    for (std::size_t j = 0; j < k.cols; ++j) {
      rayleigh += v[j] * ktkv[j];
      next_norm2 += ktkv[j] * ktkv[j];
    }
    if (next_norm2 == 0.0) return 0.0;  // start vector is in the null space
    const double next_norm = std::sqrt(next_norm2);
    for (std::size_t j = 0; j < k.cols; ++j) v[j] = ktkv[j] / next_norm;
    const double change = std::abs(rayleigh - lambda);
    lambda = rayleigh;
    if (iter > 0 && change <= 0.25 * tol * std::max(lambda, 1e-300)) {
      const double sigma = std::sqrt(std::max(lambda, 0.0));
      return certified_upper ? sigma * (1.0 + tol) : sigma;
    }
  }
  throw std::runtime_error(
      "estimate_operator_norm: no convergence after 10000 iterations; last "
      "estimate " +
      std::to_string(std::sqrt(std::max(lambda, 0.0))));
}

namespace {

void check_weight_vector(const std::vector<double>& w, std::size_t expect,
                         const char* what) {
  if (w.size() != expect) {
    throw std::invalid_argument(std::string("build_saddle_problem: ") + what +
                                " has wrong length");
  }
  for (double x : w) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string("build_saddle_problem: ") +
                                  what + " must be finite");
    }
  }
}

}  // namespace

SaddleBuild build_saddle_problem(Matrix k, std::vector<double> fx_weights,
                                 std::vector<double> fx_targets,
                                 std::vector<double> gy_weights,
                                 std::vector<double> gy_targets, FeasibleSet x,
                                 FeasibleSet y, ProxKind setup_kind,
                                 SimpleTerm j) {
  const std::size_t n = k.cols, m = k.rows;
  if (x.dim() != n || y.dim() != m) {
    throw std::invalid_argument(
        "build_saddle_problem: set dimensions must match K (x: cols, y: "
        "rows)");
  }
  check_weight_vector(fx_weights, n, "fx_weights");
  check_weight_vector(fx_targets, n, "fx_targets");
  check_weight_vector(gy_weights, m, "gy_weights");
  check_weight_vector(gy_targets, m, "gy_targets");
  for (double w : fx_weights) {
    if (w < 0.0) throw std::invalid_argument("build_saddle_problem: weights must be >= 0");
  }
  for (double w : gy_weights) {
    if (w < 0.0) throw std::invalid_argument("build_saddle_problem: weights must be >= 0");
  }

  auto saddle = std::make_shared<SaddleProblem>();
  saddle->k = std::move(k);
  saddle->fx_weights = std::move(fx_weights);
  saddle->fx_targets = std::move(fx_targets);
  saddle->gy_weights = std::move(gy_weights);
  saddle->gy_targets = std::move(gy_targets);
  saddle->x_set = x;
  saddle->y_set = y;

  ProblemSpec spec;
  spec.dim = n + m;
  spec.blocks = {Block{0, n}, Block{n, m}};
  spec.setup = make_prox_setup(setup_kind, FeasibleSet::product({x, y}), j);
  spec.j = j;

  spec.g_value = [saddle, n, m](const Point& z) {
    CompensatedAccumulator acc;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = z[i] - saddle->fx_targets[i];
      acc.add(0.5 * saddle->fx_weights[i] * d * d);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double d = z[n + i] - saddle->gy_targets[i];
      acc.add(0.5 * saddle->gy_weights[i] * d * d);
    }
    return acc.total();
  };
  spec.grad_g = [saddle, n, m](const Point& z) {
    Point out = Point::zeros_like(z);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = saddle->fx_weights[i] * (z[i] - saddle->fx_targets[i]);
    }
    for (std::size_t i = 0; i < m; ++i) {
      out[n + i] = saddle->gy_weights[i] * (z[n + i] - saddle->gy_targets[i]);
    }
    return out;
  };
  // H(z) = (K^T y, -K x); monotone with <H(u)-H(v), u-v> = 0 exactly.
  spec.h = [saddle, n, m](const Point& z) {
    Point out = Point::zeros_like(z);
    saddle->k.apply_transpose({z.values().data() + n, m},
                              {out.values().data(), n});
    std::vector<double> kx(m);
    saddle->k.apply({z.values().data(), n}, kx);
    for (std::size_t i = 0; i < m; ++i) out[n + i] = -kx[i];
    return out;
  };
  // Skew structure: (dH)^T v = -H(v).
  spec.h_jacobian_t = [h = spec.h](const Point& v) {
    Point out = h(v);
    for (double& c : out.values()) c = -c;
    return out;
  };

  double max_weight = 0.0;
  for (double w : saddle->fx_weights) max_weight = std::max(max_weight, w);
  for (double w : saddle->gy_weights) max_weight = std::max(max_weight, w);
  spec.lipschitz_l = max_weight;
  spec.lipschitz_m = estimate_operator_norm(saddle->k, 1e-12);
  spec.name = "saddle";

  return SaddleBuild{std::move(spec), *saddle};
}

SaddleBuild build_matrix_game(Matrix k) {
  const std::size_t n = k.cols, m = k.rows;
  for (double v : k.data) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("build_matrix_game: K must be finite");
    }
  }
  SaddleBuild build = build_saddle_problem(
      std::move(k), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
      std::vector<double>(m, 0.0), std::vector<double>(m, 0.0),
      FeasibleSet::simplex(n), FeasibleSet::simplex(m), ProxKind::entropy);
  build.spec.lipschitz_l = 1e-12 * build.spec.lipschitz_m;
  build.spec.l_floored = true;
  build.spec.name = "matrix_game";
  return build;
}

StochasticOracle::StochasticOracle(ProblemSpec base, NoiseKind noise_kind,
                                   double sigma, RngStream rng)
    : base_(std::move(base)), noise_kind_(noise_kind), sigma_(sigma),
      rng_(rng) {
  if (sigma < 0.0 || !std::isfinite(sigma)) {
    throw std::invalid_argument("StochasticOracle: sigma must be >= 0");
  }
}

Point StochasticOracle::sample(const Point& z, OracleCounters& counters) {
  counters.h_samples += 1;
  Point out = base_.h(z);
  if (sigma_ == 0.0) return out;

  const auto dim = static_cast<double>(out.dim());
  switch (noise_kind_) {
    case NoiseKind::gaussian_additive: {
      // i.i.d. normal coordinates scaled so E||noise||_2^2 = sigma^2.
      const double scale = sigma_ / std::sqrt(dim);
      for (double& c : out.values()) c += scale * rng_.normal();
      return out;
    }
    case NoiseKind::coordinate_sparsified: {
      // S = dim * H_i(z) e_i is unbiased with E||S - H||^2 =
      // (dim-1)||H||^2; mix H with S to hit the target variance.
      CompensatedAccumulator sq;
      for (double c : out.values()) sq.add(c * c);
      const double spread = (dim - 1.0) * sq.total();
      const double alpha =
          spread > 0.0 ? std::min(1.0, sigma_ / std::sqrt(spread)) : 0.0;
      const auto pick = static_cast<std::size_t>(rng_.uniform01() * dim);
      const std::size_t i = std::min(pick, out.dim() - 1);
      for (std::size_t c = 0; c < out.dim(); ++c) {
        const double sparsified = c == i ? dim * out[c] : 0.0;
        out[c] = (1.0 - alpha) * out[c] + alpha * sparsified;
      }
      return out;
    }
  }
  return out;
}

SaddleBuild reference_saddle() {
  constexpr std::size_t kSide = 20;
  Matrix k(kSide, kSide);
  RngStream rng(7, 0);
  for (std::size_t i = 0; i < kSide; ++i) {
    for (std::size_t j = 0; j < kSide; ++j) {
      k.at(i, j) = rng.uniform(-1.0, 1.0);
    }
  }
  const double spectral = estimate_operator_norm(k, 1e-12);
  k.scale(2.0 / spectral);

  SaddleBuild build = build_saddle_problem(
      std::move(k), std::vector<double>(kSide, 4.0),
      std::vector<double>(kSide, 0.25), std::vector<double>(kSide, 4.0),
      std::vector<double>(kSide, 0.75),
      FeasibleSet::box_uniform(kSide, 0.0, 1.0),
      FeasibleSet::box_uniform(kSide, 0.0, 1.0), ProxKind::euclidean);
  build.spec.lipschitz_m = 2.0;  // rescaled to hit this exactly
  build.spec.name = "reference_saddle";
  return build;
}

SaddleBuild rps_game() {
  Matrix k(3, 3);
  const double rows[3][3] = {{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) k.at(i, j) = rows[i][j];
  }
  SaddleBuild build = build_matrix_game(std::move(k));
  build.spec.name = "rps_game";
  return build;
}

ProblemSpec quadratic_1d() {
  ProblemSpec spec;
  spec.dim = 1;
  spec.blocks = {Block{0, 1}};
  spec.setup = make_prox_setup(ProxKind::euclidean,
                               FeasibleSet::box_uniform(1, -1.0, 1.0));
  spec.j = SimpleTerm::zero();
  spec.g_value = [](const Point& z) { return z[0] * z[0]; };
  spec.grad_g = [](const Point& z) {
    Point out = Point::zeros_like(z);
    out[0] = 2.0 * z[0];
    return out;
  };
  spec.h = [](const Point& z) { return Point::zeros_like(z); };
  spec.h_jacobian_t = [](const Point& z) { return Point::zeros_like(z); };
  spec.lipschitz_l = 2.0;
  spec.lipschitz_m = 0.0;
  spec.name = "quadratic_1d";
  return spec;
}

}  // namespace vislide
