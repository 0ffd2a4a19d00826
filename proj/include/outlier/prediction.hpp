#pragma once

#include <optional>
#include <string>
#include <vector>

#include "outlier/landscape.hpp"

namespace outlier {

/// Leading-order kernel near a*:
///   exp(-n P3(x)/2 + n P3(y)/2) * sqrt(c) / k_{r-1} * kappa^(-1/2) * K_GUE(zeta_x, zeta_y)
/// with zeta from to_local_super and zeta0 = 0.
double predict_supercritical_kernel(const Landscape& L, int n, int r, double x, double y);

/// Predicted mean density K(x, x) / n. Integrates to r/n over the chart, so
/// n times it carries mass r.
double predict_outlier_density(const Landscape& L, int n, int r, double x);

struct OutlierLaw {
  double mean = 0.0;
  double variance = 0.0;
};

/// r = 1: the outlier is asymptotically Normal(a*, 1/(n c)).
OutlierLaw predict_outlier_law_r1(const Landscape& L, int n);

struct SuppressionStatement {
  double center = 0.0;
  double radius = 0.0;
  std::string claim;
  std::string error_order;
};

SuppressionStatement predict_subcritical(const Landscape& L, int n, int r);

struct DensitySample {
  double x = 0.0;
  double value = 0.0;  // n times the predicted mean density
};

struct PredictionReport {
  Regime regime = Regime::Critical;
  int n = 0;
  int r = 0;
  double x_min = 0.0;
  double x_max = 0.0;
  std::vector<DensitySample> density;
  double integrated_mass = 0.0;  // trapezoid of the density samples
  std::optional<OutlierLaw> law_r1;
  std::optional<SuppressionStatement> suppression;
  std::string error_order;
};

/// Full report for a grid of `points` x-values on [x_min, x_max]. Throws
/// ConfigError for critical or jumping-outlier landscapes.
PredictionReport predict(const Landscape& L, int n, int r, double x_min, double x_max, int points);

}  // namespace outlier
