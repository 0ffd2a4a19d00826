#include <doctest.h>

#include <cmath>
#include <random>

#include "outlier/error.hpp"
#include "outlier/landscape.hpp"

using namespace outlier;

namespace {

const EquilibriumMeasure& gaussian() {
  static const EquilibriumMeasure em = EquilibriumMeasure::solve(Potential::gaussian());
  return em;
}

const EquilibriumMeasure& quartic() {
  static const EquilibriumMeasure em = EquilibriumMeasure::solve(Potential({0, 0, 0, 0, 0.25}));
  return em;
}

// P2'(x) = -V'(x) + a + g'(x), evaluated from the primitives by central differences.
double p2_slope(const Landscape& L, double x) {
  const double h = 1e-5;
  return (L.P(2, x + h) - L.P(2, x - h)) / (2 * h);
}

}  // namespace

TEST_CASE("critical coupling") {
  CHECK(critical_a(gaussian()) == doctest::Approx(1.0).epsilon(1e-10));
  double beta = std::pow(16.0 / 3.0, 0.25);
  CHECK(critical_a(quartic()) == doctest::Approx(0.5 * beta * beta * beta).epsilon(1e-10));
  CHECK(critical_a(quartic()) == doctest::Approx(1.75477).epsilon(1e-5));
  CHECK(std::abs(critical_a(quartic()) - quartic().g_prime_at_beta()) < 1e-8);
}

TEST_CASE("effective potentials") {
  const auto& em = gaussian();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-6, 6), im(0.05, 3);
  for (int i = 0; i < 50; ++i) {
    cplx z(re(rng), (i % 2 ? 1 : -1) * im(rng));
    cplx d = eval_P(em, 2.0, -0.3, 3, z) - (eval_P(em, 2.0, -0.3, 2, z) - eval_P(em, 2.0, -0.3, 1, z));
    CHECK(std::abs(d) < 1e-12);
  }
  CHECK(std::abs(eval_P_real(em, 2.0, 0.0, 1, 0.0)) < 1e-10);
  Landscape L = classify(em, 2.0);
  CHECK(std::abs(em.g_prime(2.5).real() - 2.5 + 2.0) < 1e-12);
  CHECK(std::abs(p2_slope(L, 2.5)) < 1e-8);
  // l2 enters additively
  for (double x : {2.2, 3.1}) CHECK(eval_P_real(em, 2.0, 0.7, 2, x) - eval_P_real(em, 2.0, 0.0, 2, x) == doctest::Approx(0.7));
}

TEST_CASE("shadow point") {
  for (double a : {0.3, 0.5, 0.8}) CHECK(find_b_star(gaussian(), a) == doctest::Approx(a + 1 / a).epsilon(1e-10));
  CHECK(find_b_star(gaussian(), 0.8) == doctest::Approx(2.05).epsilon(1e-10));
  double near = find_b_star(gaussian(), 1.0 - 1e-6);
  CHECK(near - 2.0 < 1e-5);
  CHECK(near > 2.0);
  CHECK_THROWS_AS(find_b_star(gaussian(), 1.5), ConfigError);
  CHECK_THROWS_AS(find_b_star(gaussian(), 0.0), ConfigError);

  // quartic: g'(b*) = a
  double b = find_b_star(quartic(), 0.7);
  CHECK(quartic().g_prime(b).real() == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("outlier location") {
  for (double a : {1.5, 2.0, 3.0}) {
    AStar s = find_a_star(gaussian(), a, 2.0);
    CHECK(s.unique);
    CHECK(s.location == doctest::Approx(a + 1 / a).epsilon(1e-10));
  }
  CHECK(find_a_star(gaussian(), 3.0, 2.0).location == doctest::Approx(10.0 / 3.0).epsilon(1e-10));
  CHECK(find_a_star(gaussian(), 1.5, 2.0).location == doctest::Approx(2.1667).epsilon(1e-4));
}

TEST_CASE("l2 normalisation") {
  Landscape sup = classify(gaussian(), 2.0);
  CHECK(std::abs(sup.P(2, *sup.a_star)) < 1e-10);
  CHECK(sup.l2 == doctest::Approx(fix_l2(gaussian(), 2.0, Regime::Supercritical, 2.5)).epsilon(1e-12));
  for (double x : {2.1, 2.4, 2.6, 4.0}) CHECK(sup.P(2, x) < 0.0);

  Landscape sub = classify(gaussian(), 0.5);
  CHECK(std::abs(sub.P(3, *sub.b_star)) < 1e-10);
  for (double x : {2.1, 2.4, 2.6, 4.0}) CHECK(sub.P(3, x) >= -1e-12);
}

TEST_CASE("curvature") {
  CHECK(curvature(gaussian(), 2.5) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
  CHECK(curvature(gaussian(), 10.0 / 3.0) == doctest::Approx(9.0 / 8.0).epsilon(1e-10));
  for (double a : {1.5, 2.0, 3.0}) {
    Landscape L = classify(gaussian(), a);
    CHECK(*L.curvature_c == doctest::Approx(a * a / (a * a - 1)).epsilon(1e-10));
  }
  auto shifted = EquilibriumMeasure::solve(Potential({0.5, -1.0, 0.5}));
  Landscape L = classify(shifted, 2.0);
  CHECK(*L.a_star == doctest::Approx(3.5).epsilon(1e-10));
  CHECK(*L.curvature_c == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("regimes") {
  CHECK(classify(gaussian(), 2.0).regime == Regime::Supercritical);
  CHECK(classify(gaussian(), 0.5).regime == Regime::Subcritical);
  CHECK(classify(gaussian(), 1.0).regime == Regime::Critical);
  CHECK(classify(quartic(), 0.1).regime == Regime::Subcritical);
  CHECK(classify(quartic(), 2.0).regime == Regime::Supercritical);
  CHECK_THROWS_AS(classify(gaussian(), -1.0), ConfigError);
  CHECK(to_string(Regime::JumpingOutlier) == "JumpingOutlier");

  for (const auto* em : {&gaussian(), &quartic()}) {
    double ac = critical_a(*em);
    for (int i = 0; i < 20; ++i) {
      double up = ac + 0.05 + 0.15 * i, down = (ac - 0.05) * (i + 1) / 20.0;
      CHECK(classify(*em, up).regime == Regime::Supercritical);
      CHECK(classify(*em, down).regime == Regime::Subcritical);
    }
  }
}

TEST_CASE("supercritical chart") {
  Landscape L = classify(gaussian(), 2.0);
  REQUIRE(L.chart_radius);
  CHECK(*L.chart_radius > 0.3);
  CHECK(std::abs(to_local_super(L, 400, 1, 2.5)) < 1e-12);
  cplx z = to_local_super(L, 400, 1, 2.55);
  CHECK(z.real() == doctest::Approx(std::sqrt(4.0 / 3.0 * 400) * 0.05).epsilon(0.05));
  CHECK(std::abs(z.imag()) < 1e-12);
  CHECK(to_local_super(L, 400, 1, 2.45).real() < 0.0);
  for (cplx w : {cplx(2.3, 0.0), cplx(2.6, 0.1), cplx(2.5, -0.2)}) {
    cplx zeta = to_local_super(L, 400, 2, w);
    CHECK(std::abs(from_local_super(L, 400, 2, zeta) - w) < 1e-10);
  }
  CHECK_THROWS_AS(to_local_super(L, 400, 1, 4.0), ConfigError);
  CHECK_THROWS_AS(to_local_super(L, 8, 2, 2.5), ConfigError);
  CHECK_THROWS_AS(to_local_sub(L, 400, 1, 2.5), ConfigError);
}

TEST_CASE("subcritical chart") {
  Landscape L = classify(gaussian(), 0.5);
  REQUIRE(L.suppression_radius);
  CHECK(std::abs(to_local_sub(L, 400, 1, 2.5)) < 1e-12);
  for (double x : {2.55, 2.7}) {
    cplx z = to_local_sub(L, 400, 1, x);
    CHECK(std::abs(z.real()) < 1e-12);
    CHECK(z.imag() != 0.0);
  }
  for (double x : {2.5 - 0.9 * *L.suppression_radius, 2.5, 2.5 + 0.9 * *L.suppression_radius}) CHECK(L.P(2, x) < 0.0);
}

TEST_CASE("non-convex single band") {
  // V'' < 0 near the origin, but the equilibrium measure stays one-cut
  auto em = EquilibriumMeasure::solve(Potential({0, 0, -0.3, 0, 0.25}));
  CHECK_FALSE(em.potential().is_convex());
  double ac = critical_a(em);
  CHECK(classify(em, ac + 0.5).regime == Regime::Supercritical);
  CHECK(classify(em, 0.5 * ac).regime == Regime::Subcritical);
}
