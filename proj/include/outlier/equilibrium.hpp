#pragma once

#include <complex>
#include <vector>

#include "outlier/polynomial.hpp"
#include "outlier/potential.hpp"

namespace outlier {

using cplx = std::complex<double>;

struct Band {
  double alpha = 0.0;
  double beta = 0.0;

  double midpoint() const { return 0.5 * (alpha + beta); }
  double halfwidth() const { return 0.5 * (beta - alpha); }
};

struct EndpointResiduals {
  double first = 0.0;   // (1/pi) int V'(s) ds / sqrt((s-alpha)(beta-s))
  double second = 0.0;  // (1/2pi) int s V'(s) ds / sqrt(...) - 1
};

/// Residuals of the two moment conditions that fix a single-band support,
/// evaluated exactly by Gauss-Chebyshev quadrature.
EndpointResiduals endpoint_residuals(const Potential& V, const Band& band);

/// Band [alpha, beta] of the single-band equilibrium measure of V.
///
/// Newton on (midpoint, log halfwidth) with homotopy from a quadratic
/// potential. Throws MathError("no single-band solution found") if no start
/// converges.
Band solve_endpoints(const Potential& V);

struct QuadratureOptions {
  int panels = 16;  // uniform Gauss-Legendre panels on the angle variable
};

/// Equilibrium measure rho(s) = h(s) sqrt((s-alpha)(beta-s)) / (2 pi) on a
/// single band together with its log transform g and the multiplier l1.
///
/// All integrals against rho are computed in the angle variable
/// s = m + w cos(theta), where rho(s) ds = h(s) w^2 sin^2(theta) dtheta / (2 pi)
/// is smooth. Points near the band get extra panels graded toward the
/// nearest angle.
class EquilibriumMeasure {
 public:
  // Throws MathError for non-regular or multi-band data.
  static EquilibriumMeasure build(const Potential& V, const Band& band, QuadratureOptions opts = {});
  static EquilibriumMeasure solve(const Potential& V, QuadratureOptions opts = {}) {
    return build(V, solve_endpoints(V), opts);
  }

  const Potential& potential() const { return V_; }
  const Band& band() const { return band_; }
  const Polynomial& h() const { return h_; }
  double l1() const { return l1_; }
  int panels() const { return opts_.panels; }

  double density(double s) const;
  double mass() const;

  // Principal branch, cut on (-inf, beta]. Throws ConfigError on the cut.
  cplx g(cplx z) const;
  // Re g, defined on the whole real line.
  double re_g(double x) const;
  // Throws ConfigError within 1e-12 of the band.
  cplx g_prime(cplx z) const;
  cplx g_second(cplx z) const;
  // g'(beta+) from the quadrature; the integrand stays bounded at the edge.
  double g_prime_at_beta() const;
  // g(base + u) - g(base) for real base > beta, accurate for small |u|.
  cplx g_increment(double base, cplx u) const;

  // P1(x) = -V(x) + 2 Re g(x) + l1 on the real axis.
  double re_p1(double x) const;

 private:
  EquilibriumMeasure(Potential V, Band band, Polynomial h, QuadratureOptions opts)
      : V_(std::move(V)), band_(band), h_(std::move(h)), opts_(opts) {}

  template <class F>
  auto integrate(cplx focus, F&& f) const;

  Potential V_;
  Band band_;
  Polynomial h_;
  QuadratureOptions opts_;
  double l1_ = 0.0;
};

}  // namespace outlier
