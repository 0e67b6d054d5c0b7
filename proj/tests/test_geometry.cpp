#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "vislide/geometry.hpp"
#include "vislide/rng.hpp"

using namespace vislide;

namespace {

Point random_feasible(const FeasibleSet& set, RngStream& rng) {
  Point raw = Point::zeros(set.dim());
  for (std::size_t i = 0; i < raw.dim(); ++i) raw[i] = rng.uniform(-1.5, 1.5);
  Point projected = set.project(raw);
  if (!set.all_box()) return projected;
  return projected;
}

Point random_interior_simplex(std::size_t dim, RngStream& rng) {
  std::vector<double> v(dim);
  double sum = 0.0;
  for (auto& x : v) {
    x = 0.05 + rng.uniform01();
    sum += x;
  }
  for (auto& x : v) x /= sum;
  return Point(v);
}

}  // namespace

TEST_CASE("setup construction rejects unsupported combinations") {
  CHECK_THROWS_AS(
      make_prox_setup(ProxKind::entropy, FeasibleSet::box_uniform(2, 0, 1)),
      std::invalid_argument);
  CHECK_THROWS_AS(make_prox_setup(ProxKind::entropy, FeasibleSet::simplex(3),
                                  SimpleTerm::l1(0.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_prox_setup(ProxKind::euclidean, FeasibleSet::simplex(3),
                                  SimpleTerm::l1(0.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      make_prox_setup(ProxKind::euclidean,
                      FeasibleSet::ball({0.0, 0.0}, 1.0), SimpleTerm::l1(0.5)),
      std::invalid_argument);
  CHECK_NOTHROW(make_prox_setup(ProxKind::entropy, FeasibleSet::simplex(3)));
  CHECK_NOTHROW(make_prox_setup(
      ProxKind::entropy,
      FeasibleSet::product({FeasibleSet::simplex(2), FeasibleSet::simplex(4)})));
  CHECK_NOTHROW(make_prox_setup(ProxKind::euclidean,
                                FeasibleSet::box_uniform(2, 0, 1),
                                SimpleTerm::l1(0.25)));
}

TEST_CASE("membership and projection agree") {
  RngStream rng(21, 0);
  const std::vector<FeasibleSet> sets = {
      FeasibleSet::box_uniform(4, -1.0, 2.0),
      FeasibleSet::ball({0.5, -0.5, 0.0}, 1.5),
      FeasibleSet::simplex(5),
      FeasibleSet::product(
          {FeasibleSet::box_uniform(2, 0.0, 1.0), FeasibleSet::simplex(3)}),
  };
  for (const FeasibleSet& set : sets) {
    for (int trial = 0; trial < 200; ++trial) {
      Point raw = Point::zeros(set.dim());
      for (std::size_t i = 0; i < raw.dim(); ++i) {
        raw[i] = rng.uniform(-2.5, 2.5);
      }
      const Point projected = set.project(raw);
      CHECK(set.member(projected));
      // projection is idempotent
      const Point twice = set.project(projected);
      for (std::size_t i = 0; i < twice.dim(); ++i) {
        CHECK(std::abs(twice[i] - projected[i]) <= 1e-12);
      }
      // member points project to themselves
      if (set.member(raw)) {
        for (std::size_t i = 0; i < raw.dim(); ++i) {
          CHECK(std::abs(projected[i] - raw[i]) <= 1e-12);
        }
      } else {
        double moved = 0.0;
        for (std::size_t i = 0; i < raw.dim(); ++i) {
          moved = std::max(moved, std::abs(projected[i] - raw[i]));
        }
        CHECK(moved > 1e-12);
      }
    }
  }
}

TEST_CASE("simplex projection lands on the simplex and fixes members") {
  RngStream rng(22, 0);
  const FeasibleSet simplex = FeasibleSet::simplex(6);
  for (int trial = 0; trial < 200; ++trial) {
    const Point inside = random_interior_simplex(6, rng);
    const Point fixed = simplex.project(inside);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(fixed[i] == doctest::Approx(inside[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("bregman examples") {
  const auto euclid =
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(2, -5, 5));
  CHECK(bregman(euclid, Point({0.3, 0.7}), Point({0.3, 0.7})) == 0.0);
  CHECK(bregman(euclid, Point({0.0, 0.0}), Point({1.0, 1.0})) ==
        doctest::Approx(1.0));

  const auto entropy =
      make_prox_setup(ProxKind::entropy, FeasibleSet::simplex(2));
  const Point z({0.5, 0.5});
  const Point u({0.9, 0.1});
  const long double direct = 0.9L * std::log(0.9L / 0.5L) +
                             0.1L * std::log(0.1L / 0.5L);
  CHECK(std::abs(bregman(entropy, z, u) - static_cast<double>(direct)) <=
        1e-12);

  CHECK_THROWS_AS(bregman(entropy, Point({0.0, 1.0}), u),
                  std::invalid_argument);
}

TEST_CASE("bregman is positive off-diagonal and zero on it") {
  RngStream rng(23, 0);
  const auto entropy =
      make_prox_setup(ProxKind::entropy, FeasibleSet::simplex(4));
  for (int trial = 0; trial < 100; ++trial) {
    const Point z = random_interior_simplex(4, rng);
    const Point u = random_interior_simplex(4, rng);
    CHECK(bregman(entropy, z, z) == doctest::Approx(0.0).epsilon(1e-14));
    if (norm(diff(z, u), NormKind::l1) > 1e-6) {
      CHECK(bregman(entropy, z, u) > 0.0);
    }
  }
}

TEST_CASE("strong convexity of the prox function, 1000 pairs per setup") {
  RngStream rng(24, 0);
  const std::vector<ProxSetup> setups = {
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(3, -1, 2)),
      make_prox_setup(ProxKind::euclidean, FeasibleSet::ball({0.0, 0.0}, 2.0)),
      make_prox_setup(ProxKind::entropy, FeasibleSet::simplex(4)),
      make_prox_setup(ProxKind::entropy,
                      FeasibleSet::product({FeasibleSet::simplex(3),
                                            FeasibleSet::simplex(3)})),
  };
  for (const ProxSetup& setup : setups) {
    for (int trial = 0; trial < 1000; ++trial) {
      Point z, u;
      if (setup.prox == ProxKind::entropy) {
        z = Point::zeros(setup.set.dim());
        u = Point::zeros(setup.set.dim());
        std::size_t offset = 0;
        const auto blocks = setup.set.natural_blocks();
        for (const Block& b : blocks) {
          const Point zb = random_interior_simplex(b.length, rng);
          const Point ub = random_interior_simplex(b.length, rng);
          for (std::size_t i = 0; i < b.length; ++i) {
            z[offset + i] = zb[i];
            u[offset + i] = ub[i];
          }
          offset += b.length;
        }
      } else {
        z = random_feasible(setup.set, rng);
        u = random_feasible(setup.set, rng);
      }
      const double d = setup_norm(setup, diff(z, u));
      CHECK(bregman(setup, z, u) >= 0.5 * d * d - 1e-10);
    }
  }
}

TEST_CASE("prox_map trivial cases") {
  const auto box2 =
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(2, 0, 1));
  const Point result = prox_map(box2, Point::zeros(2), Point({0.0, 0.0}),
                                Point({1.0, 1.0}), 1.0, 1.0);
  CHECK(result[0] == doctest::Approx(0.5));
  CHECK(result[1] == doctest::Approx(0.5));

  // g = 0, J = 0, both centers equal: the minimizer is the center itself.
  const auto entropy =
      make_prox_setup(ProxKind::entropy, FeasibleSet::simplex(3));
  const Point c({0.2, 0.5, 0.3});
  const Point stay = prox_map(entropy, Point::zeros(3), c, c, 0.7, 1.3);
  for (int i = 0; i < 3; ++i) {
    CHECK(stay[i] == doctest::Approx(c[i]).epsilon(1e-14));
  }

  const Point ball_center({0.5, -0.25});
  const auto ball =
      make_prox_setup(ProxKind::euclidean, FeasibleSet::ball({0.0, 0.0}, 2.0));
  const Point stay2 =
      prox_map(ball, Point::zeros(2), ball_center, ball_center, 2.0, 3.0);
  for (int i = 0; i < 2; ++i) {
    CHECK(stay2[i] == doctest::Approx(ball_center[i]).epsilon(1e-14));
  }
}

TEST_CASE("prox_map matches the fine-grid oracle on a steep pull") {
  const auto box2 =
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(2, 0, 1));
  const Point g({10.0, -10.0});
  const Point center({0.5, 0.5});
  const Point result = prox_map(box2, g, center, center, 1.0, 1.0);
  CHECK(result[0] == doctest::Approx(0.0));
  CHECK(result[1] == doctest::Approx(1.0));

  const Point oracle = testing::grid_minimize_2d(box2, g, center, center, 1.0, 1.0);
  CHECK(std::abs(result[0] - oracle[0]) <= 1e-6);
  CHECK(std::abs(result[1] - oracle[1]) <= 1e-6);
}

TEST_CASE("prox_map validates its arguments") {
  const auto box2 =
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(2, 0, 1));
  const Point c({0.5, 0.5});
  CHECK_THROWS_AS(prox_map(box2, Point::zeros(2), c, c, 0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(prox_map(box2, Point::zeros(2), c, c, -1.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(prox_map(box2, Point::zeros(3), c, c, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("double-Bregman collapse: Euclidean prox is shift-scale-project") {
  RngStream rng(25, 0);
  const std::vector<ProxSetup> setups = {
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(4, -1, 1)),
      make_prox_setup(ProxKind::euclidean, FeasibleSet::ball({0.0, 0.0, 0.0}, 1.2)),
      make_prox_setup(ProxKind::euclidean, FeasibleSet::simplex(4)),
  };
  for (const ProxSetup& setup : setups) {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = setup.set.dim();
      Point g = Point::zeros(n);
      for (std::size_t i = 0; i < n; ++i) g[i] = rng.uniform(-3.0, 3.0);
      const Point z0 = random_feasible(setup.set, rng);
      const Point z1 = random_feasible(setup.set, rng);
      const double beta = rng.uniform(0.1, 4.0);
      const double eta = rng.uniform(0.1, 4.0);
      const Point got = prox_map(setup, g, z0, z1, beta, eta);
      Point shifted = Point::zeros(n);
      for (std::size_t i = 0; i < n; ++i) {
        shifted[i] = (beta * z0[i] + eta * z1[i] - g[i]) / (beta + eta);
      }
      const Point want = setup.set.project(shifted);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(got[i] - want[i]) <= 1e-10);
      }
    }
  }
}

TEST_CASE("prox_map output is always feasible") {
  RngStream rng(26, 0);
  const std::vector<ProxSetup> setups = {
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(3, 0, 1),
                      SimpleTerm::l1(0.3)),
      make_prox_setup(ProxKind::entropy, FeasibleSet::simplex(5)),
      make_prox_setup(ProxKind::entropy,
                      FeasibleSet::product({FeasibleSet::simplex(2),
                                            FeasibleSet::simplex(3)})),
      make_prox_setup(ProxKind::euclidean, FeasibleSet::ball({0.0, 0.0}, 0.7)),
  };
  for (const ProxSetup& setup : setups) {
    for (int trial = 0; trial < 250; ++trial) {
      const std::size_t n = setup.set.dim();
      Point g = Point::zeros(n);
      for (std::size_t i = 0; i < n; ++i) g[i] = rng.uniform(-20.0, 20.0);
      Point z0, z1;
      if (setup.prox == ProxKind::entropy) {
        z0 = prox_map(setup, Point::zeros(n), setup.set.center(),
                      setup.set.center(), 1.0, 1.0);
        z1 = prox_map(setup, g, setup.set.center(), setup.set.center(), 1.0,
                      1.0);
      } else {
        z0 = random_feasible(setup.set, rng);
        z1 = random_feasible(setup.set, rng);
      }
      const double beta = rng.uniform(0.0, 2.0);
      const double eta = rng.uniform(0.05, 2.0);
      const Point out = prox_map(setup, g, z0, z1, beta, eta);
      CHECK(setup.set.member(out, 1e-12));
    }
  }
}

TEST_CASE("nonexpansiveness in the linear term") {
  RngStream rng(27, 0);
  const auto setup =
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(4, -2, 2));
  for (int trial = 0; trial < 300; ++trial) {
    Point g1 = Point::zeros(4), g2 = Point::zeros(4);
    for (int i = 0; i < 4; ++i) {
      g1[i] = rng.uniform(-5.0, 5.0);
      g2[i] = rng.uniform(-5.0, 5.0);
    }
    const Point z0 = random_feasible(setup.set, rng);
    const Point z1 = random_feasible(setup.set, rng);
    const double beta = rng.uniform(0.1, 3.0);
    const double eta = rng.uniform(0.1, 3.0);
    const Point p1 = prox_map(setup, g1, z0, z1, beta, eta);
    const Point p2 = prox_map(setup, g2, z0, z1, beta, eta);
    CHECK(norm(diff(p1, p2), NormKind::euclidean) <=
          norm(diff(g1, g2), NormKind::euclidean) / (beta + eta) + 1e-12);
  }
}

TEST_CASE("optimality residual: zero at trivial fixed point") {
  const auto box2 =
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(2, 0, 1));
  const Point c({0.25, 0.75});
  CHECK(prox_optimality_residual(box2, Point::zeros(2), c, c, 1.0, 1.0, c) ==
        doctest::Approx(0.0));
}

TEST_CASE("optimality residual: small at the minimizer, positive away") {
  RngStream rng(28, 0);
  const std::vector<ProxSetup> setups = {
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(3, 0, 1)),
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(2, 0, 1),
                      SimpleTerm::l1(0.4)),
      make_prox_setup(ProxKind::entropy, FeasibleSet::simplex(3)),
      make_prox_setup(ProxKind::euclidean, FeasibleSet::ball({0.0, 0.0}, 1.0)),
  };
  for (const ProxSetup& setup : setups) {
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = setup.set.dim();
      Point g = Point::zeros(n);
      for (std::size_t i = 0; i < n; ++i) g[i] = rng.uniform(-2.0, 2.0);
      Point z0, z1;
      if (setup.prox == ProxKind::entropy) {
        RngStream inner(29, trial);
        z0 = random_interior_simplex(n, inner);
        z1 = random_interior_simplex(n, inner);
      } else {
        z0 = random_feasible(setup.set, rng);
        z1 = random_feasible(setup.set, rng);
      }
      const double beta = rng.uniform(0.2, 2.0);
      const double eta = rng.uniform(0.2, 2.0);
      const Point minimizer = prox_map(setup, g, z0, z1, beta, eta);
      CHECK(prox_optimality_residual(setup, g, z0, z1, beta, eta, minimizer) <=
            1e-8);

      // displaced interior point must violate optimality
      Point displaced = minimizer;
      displaced[0] += 0.1;
      displaced = setup.set.project(displaced);
      if (setup.prox == ProxKind::entropy) {
        for (double& v : displaced.values()) v = std::max(v, 1e-9);
      }
      if (norm(diff(displaced, minimizer), NormKind::euclidean) > 0.05) {
        CHECK(prox_optimality_residual(setup, g, z0, z1, beta, eta,
                                       displaced) > 0.0);
      }
    }
  }
}

TEST_CASE("prox_map agrees with the projected-gradient oracle") {
  RngStream rng(30, 0);
  const std::vector<ProxSetup> setups = {
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(3, 0, 1)),
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(3, 0, 1),
                      SimpleTerm::l1(0.5)),
      make_prox_setup(ProxKind::euclidean, FeasibleSet::ball({0.0, 0.0}, 1.0)),
      make_prox_setup(ProxKind::entropy, FeasibleSet::simplex(3)),
  };
  for (const ProxSetup& setup : setups) {
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t n = setup.set.dim();
      Point g = Point::zeros(n);
      for (std::size_t i = 0; i < n; ++i) g[i] = rng.uniform(-2.0, 2.0);
      Point z0, z1;
      if (setup.prox == ProxKind::entropy) {
        RngStream inner(31, trial);
        z0 = random_interior_simplex(n, inner);
        z1 = random_interior_simplex(n, inner);
      } else {
        z0 = random_feasible(setup.set, rng);
        z1 = random_feasible(setup.set, rng);
      }
      const double beta = rng.uniform(0.3, 2.0);
      const double eta = rng.uniform(0.3, 2.0);
      const Point got = prox_map(setup, g, z0, z1, beta, eta);
      const Point oracle = testing::prox_bruteforce(setup, g, z0, z1, beta, eta);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(got[i] - oracle[i]) <= 1e-6);
      }
    }
  }
}

TEST_CASE("omega closed forms") {
  const auto box4 =
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(4, 0, 1));
  CHECK(omega(box4, box4.set.center()) == doctest::Approx(0.5));

  for (std::size_t n : {3u, 7u}) {
    const auto entropy =
        make_prox_setup(ProxKind::entropy, FeasibleSet::simplex(n));
    CHECK(omega(entropy, entropy.set.center()) ==
          doctest::Approx(std::log(static_cast<double>(n))));
  }

  const auto box2 =
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(2, 0, 1));
  const Point z0({0.2, 0.9});
  double vertex_best = 0.0;
  for (const Point& v : box2.set.vertices(16)) {
    vertex_best = std::max(vertex_best, bregman(box2, z0, v));
  }
  CHECK(omega(box2, z0) == doctest::Approx(vertex_best).epsilon(1e-12));

  const auto ball =
      make_prox_setup(ProxKind::euclidean, FeasibleSet::ball({1.0, 0.0}, 2.0));
  CHECK(omega(ball, Point({0.0, 0.0})) == doctest::Approx(0.5 * 3.0 * 3.0));

  const auto prod = make_prox_setup(
      ProxKind::entropy,
      FeasibleSet::product({FeasibleSet::simplex(3), FeasibleSet::simplex(3)}));
  CHECK(omega(prod, prod.set.center()) ==
        doctest::Approx(2.0 * std::log(3.0)));
}

TEST_CASE("omega dominates sampled Bregman distances") {
  RngStream rng(32, 0);
  const auto setup =
      make_prox_setup(ProxKind::euclidean, FeasibleSet::box_uniform(5, -1, 3));
  const Point z0 = random_feasible(setup.set, rng);
  const double sup = omega(setup, z0);
  for (int trial = 0; trial < 500; ++trial) {
    const Point z = random_feasible(setup.set, rng);
    CHECK(bregman(setup, z0, z) <= sup + 1e-12);
  }
}
