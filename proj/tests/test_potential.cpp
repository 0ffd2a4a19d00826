#include <doctest.h>

#include <cmath>
#include <complex>

#include "outlier/error.hpp"
#include "outlier/potential.hpp"

using namespace outlier;
using cd = std::complex<double>;

TEST_CASE("evaluation") {
  Potential g = Potential::gaussian();
  CHECK(g.eval(2.0) == doctest::Approx(2.0));
  CHECK(Potential({0, 0, 0, 0, 0.25}).eval(0.0) == 0.0);
  cd v = g.eval(cd(1, 1));
  CHECK(std::abs(v - cd(0, 1)) < 1e-15);
}

TEST_CASE("derivatives") {
  auto d = Potential({0, 0, 0, 0, 0.25}).derivative();
  REQUIRE(d.degree() == 3);
  CHECK(d.coeff(3) == doctest::Approx(1.0));
  CHECK(d.coeff(2) == 0.0);
  CHECK(d.coeff(0) == 0.0);

  auto d2 = Potential::gaussian().derivative(2);
  CHECK(d2.degree() == 0);
  CHECK(d2.coeff(0) == doctest::Approx(1.0));

  auto d3 = Potential({0, 0, 1, 0, 0.1}).derivative();
  CHECK(d3.coeff(3) == doctest::Approx(0.4));
  CHECK(d3.coeff(1) == doctest::Approx(2.0));
  CHECK(d3.coeff(2) == 0.0);
}

TEST_CASE("convexity") {
  CHECK(Potential::gaussian().is_convex());
  CHECK(Potential({0, 0, 0, 0, 0.25}).is_convex());
  CHECK_FALSE(Potential({0, 0, -2, 0, 0.25}).is_convex());
  // V'' = 3x^2 - 4 is positive far out
  CHECK(Potential({0, 0, -2, 0, 0.25}).is_convex({2.0, 5.0}));
  CHECK(Potential({0, 0, 0, 0, 0, 0, 1.0}).is_convex());
}

TEST_CASE("admissibility") {
  CHECK_THROWS_AS(Potential({0, 0, 0, 1}), ConfigError);
  CHECK_THROWS_AS(Potential({0, 0, -0.5}), ConfigError);
  CHECK_THROWS_AS(Potential({1.0}), ConfigError);
  CHECK_THROWS_AS(Potential({0, 0, NAN}), ConfigError);
  CHECK_THROWS_AS(Potential({}), ConfigError);
  // trailing zeros are trimmed before the degree check
  CHECK(Potential({0, 0, 0.5, 0, 0}).degree() == 2);
}

TEST_CASE("confinement beats any linear term") {
  for (auto c : {std::vector<double>{0, 0, 0.5}, std::vector<double>{1, -2, 0, 0.3, 0.25},
                 std::vector<double>{0, 0, -2, 0, 0.25}}) {
    Potential V(c);
    for (double a : {0.0, 0.5, 3.0, -7.0}) {
      double sum = 1.0 + std::abs(a);
      for (double x : c) sum += std::abs(x);
      double x = 10.0 * sum;
      CHECK(V.eval(x) - a * x > 0.0);
      CHECK(V.eval(-x) + a * x > 0.0);
    }
  }
}

TEST_CASE("translation") {
  Potential V({0, 1, 0, -1, 0.5});
  Potential W = V.shifted(0.7);
  for (double x : {-2.0, 0.0, 0.3, 1.9}) CHECK(W.eval(x) == doctest::Approx(V.eval(x - 0.7)).epsilon(1e-13));
}

TEST_CASE("polynomial real roots") {
  Polynomial p({-6, 11, -6, 1});  // (x-1)(x-2)(x-3)
  auto roots = p.real_roots();
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(roots[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(roots[2] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(Polynomial({1, 0, 1}).real_roots().empty());
}
