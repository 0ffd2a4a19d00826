#pragma once

#include <optional>
#include <string>
#include <vector>

#include "outlier/equilibrium.hpp"

namespace outlier {

enum class Regime { Supercritical, Subcritical, Critical, JumpingOutlier };

std::string to_string(Regime regime);

/// Critical source strength a_c = V'(beta)/2. Cross-checked against the
/// quadrature value of g'(beta+); throws MathError("equilibrium inconsistency")
/// when they differ by more than 1e-6.
double critical_a(const EquilibriumMeasure& em);

/// Effective potentials
///   P1 = -V + 2g + l1,   P2 = -V + a z + g + l2,   P3 = P2 - P1.
cplx eval_P(const EquilibriumMeasure& em, double a, double l2, int which, cplx z);
/// Real parts on the real axis; valid everywhere including the band.
double eval_P_real(const EquilibriumMeasure& em, double a, double l2, int which, double x);

/// Unique root of g'(z) = a on (beta, inf) for 0 < a < a_c.
double find_b_star(const EquilibriumMeasure& em, double a);

/// Point beyond which P2' = -V' + a + g' < -1 for good.
double x_max(const EquilibriumMeasure& em, double a);

struct AStar {
  double location = 0.0;
  bool unique = true;
  std::vector<double> local_maxima;  // every interior local maximum of P2 found
};

/// Global maximiser of P2 on (lower, x_max]. Local maxima are isolated by a
/// sign scan of P2' on a geometric grid and polished by Newton. Two maxima
/// whose P2 values agree within 1e-9 set unique = false.
AStar find_a_star(const EquilibriumMeasure& em, double a, double lower);

/// l2 making P2(a*) = 0 (supercritical) or P3(b*) = 0 (subcritical).
double fix_l2(const EquilibriumMeasure& em, double a, Regime regime, double point);

/// c = V''(a*) - g''(a*). Throws MathError on a degenerate maximum.
double curvature(const EquilibriumMeasure& em, double a_star);

struct Landscape {
  EquilibriumMeasure em;
  double a = 0.0;
  double a_c = 0.0;
  Regime regime = Regime::Critical;
  std::optional<double> a_star;
  std::optional<double> b_star;
  std::optional<double> curvature_c;
  double l2 = 0.0;
  double x_max = 0.0;
  // Radius of the disk around a* (supercritical) or b* (subcritical) on
  // which the local coordinate is certified.
  std::optional<double> chart_radius;
  // Radius of the disk around b* on which Re P2 < 0 was certified.
  std::optional<double> suppression_radius;

  const Band& band() const { return em.band(); }
  double P(int which, double x) const { return eval_P_real(em, a, l2, which, x); }
  cplx P(int which, cplx z) const { return eval_P(em, a, l2, which, z); }
};

/// Regime of the pair (V, a) with every secondary condition checked
/// numerically. Requires a > 0.
Landscape classify(const EquilibriumMeasure& em, double a);

/// Leading-order conformal coordinate near a*: zeta = rho / sqrt(kappa),
/// rho^2 = -2 P2, rho'(a*) = sqrt(c) > 0, kappa = r/n.
cplx to_local_super(const Landscape& L, int n, int r, cplx z);
cplx from_local_super(const Landscape& L, int n, int r, cplx zeta);

/// Coordinate near b*: zeta = rho / (i sqrt(kappa)), rho^2 = 2 P3.
cplx to_local_sub(const Landscape& L, int n, int r, cplx z);

}  // namespace outlier
