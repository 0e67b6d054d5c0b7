#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "vislide/counters.hpp"
#include "vislide/point.hpp"
#include "vislide/rng.hpp"

using namespace vislide;

TEST_CASE("block structure must tile the value array") {
  CHECK_NOTHROW(Point({1.0, 2.0, 3.0}, {Block{0, 2}, Block{2, 1}}));
  CHECK_THROWS_AS(Point({1.0, 2.0, 3.0}, {Block{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Point({1.0, 2.0, 3.0}, {Block{0, 2}, Block{1, 2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Point({1.0, 2.0}, {Block{0, 1}, Block{1, 2}}),
                  std::invalid_argument);

  const Point p({1.0, 2.0, 3.0}, {Block{0, 2}, Block{2, 1}});
  CHECK(p.block_span(0).size() == 2);
  CHECK(p.block_span(1)[0] == 3.0);
}

TEST_CASE("dual pairing basics") {
  const Point zero = Point::zeros(4);
  const Point b({0.5, -2.0, 7.0, 1.25});
  CHECK(dual_pairing(zero, b) == 0.0);

  CHECK(dual_pairing(Point({1.0, 2.0}), Point({3.0, 4.0})) == 11.0);

  CHECK_THROWS_AS(dual_pairing(Point::zeros(3), Point::zeros(4)),
                  std::invalid_argument);
}

TEST_CASE("dual pairing matches the extended-precision oracle") {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> av(100), bv(100);
    for (auto& v : av) v = rng.uniform(-10.0, 10.0);
    for (auto& v : bv) v = rng.uniform(-10.0, 10.0);
    const Point a(av), b(bv);
    const double got = dual_pairing(a, b);
    const long double want = testing::pairing_oracle(a, b);
    CHECK(std::abs(got - static_cast<double>(want)) <=
          1e-12 * std::max(1.0, std::abs(static_cast<double>(want))));
  }
}

TEST_CASE("pairing is bilinear and symmetric") {
  RngStream rng(12, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> av(20), bv(20), cv(20);
    for (auto& v : av) v = rng.uniform(-5.0, 5.0);
    for (auto& v : bv) v = rng.uniform(-5.0, 5.0);
    for (auto& v : cv) v = rng.uniform(-5.0, 5.0);
    const Point a(av), b(bv), c(cv);
    const double alpha = rng.uniform(-2.0, 2.0);
    CHECK(dual_pairing(a, b) == doctest::Approx(dual_pairing(b, a)).epsilon(1e-14));
    CHECK(dual_pairing(lin_comb(alpha, a, 1.0, c), b) ==
          doctest::Approx(alpha * dual_pairing(a, b) + dual_pairing(c, b))
              .epsilon(1e-11));
  }
}

TEST_CASE("norm basics") {
  CHECK(norm(Point::zeros(5), NormKind::euclidean) == 0.0);
  CHECK(norm(Point::zeros(5), NormKind::l1) == 0.0);
  CHECK(norm(Point({3.0, 4.0}), NormKind::euclidean) == doctest::Approx(5.0));
  CHECK(norm(Point({1.0, -2.0, 3.0}), NormKind::l1) == doctest::Approx(6.0));
}

TEST_CASE("triangle inequality and homogeneity on random inputs") {
  RngStream rng(13, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> av(8), bv(8);
    for (auto& v : av) v = rng.uniform(-3.0, 3.0);
    for (auto& v : bv) v = rng.uniform(-3.0, 3.0);
    const Point a(av), b(bv);
    const double c = rng.uniform(-4.0, 4.0);
    for (NormKind kind : {NormKind::euclidean, NormKind::l1}) {
      CHECK(norm(lin_comb(1.0, a, 1.0, b), kind) <=
            norm(a, kind) + norm(b, kind) + 1e-12);
      CHECK(norm(lin_comb(c, a, 0.0, b), kind) ==
            doctest::Approx(std::abs(c) * norm(a, kind)).epsilon(1e-12));
      CHECK(norm(a, kind) >= 0.0);
    }
  }
}

TEST_CASE("Cauchy-Schwarz on 1000 random pairs") {
  RngStream rng(14, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> av(10), bv(10);
    for (auto& v : av) v = rng.uniform(-2.0, 2.0);
    for (auto& v : bv) v = rng.uniform(-2.0, 2.0);
    const Point a(av), b(bv);
    CHECK(std::abs(dual_pairing(a, b)) <=
          norm(a, NormKind::euclidean) * norm(b, NormKind::euclidean) + 1e-12);
  }
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(123, 7), b(123, 7), c(123, 8);
  bool all_equal_c = true;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    if (va != c.next_u64()) all_equal_c = false;
  }
  CHECK_FALSE(all_equal_c);
}

TEST_CASE("uniform01 stays in [0,1) and normal has sane moments") {
  RngStream rng(99, 1);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double g = rng.normal();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("finiteness guard names the offending coordinate") {
  Point p({1.0, std::nan(""), 3.0});
  CHECK_FALSE(p.all_finite());
  CHECK_THROWS_WITH_AS(p.require_finite("unit test"),
                       doctest::Contains("coordinate 1"), std::runtime_error);
}

TEST_CASE("counters compare and default to zero") {
  OracleCounters a, b;
  CHECK(a == b);
  a.h_evals = 3;
  CHECK(a != b);
}
