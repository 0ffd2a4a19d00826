#pragma once

#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "outlier/polynomial.hpp"

namespace outlier {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static Interval all_reals() { return {}; }
};

/// External field V of the matrix model: a real polynomial of even degree
/// d >= 2 with positive leading coefficient, so that V(x) - a x grows without
/// bound for every real a.
class Potential {
 public:
  // Throws ConfigError when the coefficients are not admissible.
  explicit Potential(std::vector<double> coeffs);

  static Potential gaussian() { return Potential({0.0, 0.0, 0.5}); }

  int degree() const { return poly_.degree(); }
  std::span<const double> coeffs() const { return poly_.coeffs(); }
  const Polynomial& polynomial() const { return poly_; }

  double eval(double x) const { return poly_(x); }
  std::complex<double> eval(std::complex<double> z) const { return poly_(z); }

  // Orders above the degree give the zero polynomial.
  Polynomial derivative(int order = 1) const { return poly_.derivative(order); }

  // V(z - t).
  Potential shifted(double t) const;

  // V'' >= 0 on the domain; isolated zeros of V'' are allowed.
  bool is_convex(Interval domain = Interval::all_reals()) const;

  // True when V is exactly quadratic.
  bool is_quadratic() const { return degree() == 2; }

 private:
  Polynomial poly_;
};

}  // namespace outlier
