#include "outlier/prediction.hpp"

#include <cmath>

#include "outlier/error.hpp"
#include "outlier/gue_kernel.hpp"

namespace outlier {
namespace {

void require_super(const Landscape& L) {
  if (L.regime != Regime::Supercritical)
    throw ConfigError("prediction needs a supercritical landscape, got " + to_string(L.regime));
}

constexpr const char* kKernelError = "O(n^{-(1-gamma)/2}) relative, with r = C n^gamma";

}  // namespace

double predict_supercritical_kernel(const Landscape& L, int n, int r, double x, double y) {
  require_super(L);
  const double kappa = static_cast<double>(r) / n;
  const double zx = to_local_super(L, n, r, cplx(x, 0.0)).real();
  const double zy = to_local_super(L, n, r, cplx(y, 0.0)).real();
  const double conj = (x == y) ? 1.0 : std::exp(-0.5 * n * L.P(3, x) + 0.5 * n * L.P(3, y));
  const GueKernel gue(r);
  return conj * std::sqrt(*L.curvature_c) / norm_k(r, r - 1) / std::sqrt(kappa) * gue(zx, zy);
}

double predict_outlier_density(const Landscape& L, int n, int r, double x) {
  return predict_supercritical_kernel(L, n, r, x, x) / n;
}

OutlierLaw predict_outlier_law_r1(const Landscape& L, int n) {
  require_super(L);
  if (n <= 0) throw ConfigError("n must be positive");
  return {*L.a_star, 1.0 / (n * *L.curvature_c)};
}

SuppressionStatement predict_subcritical(const Landscape& L, int n, int r) {
  if (L.regime != Regime::Subcritical)
    throw ConfigError("suppression statement needs a subcritical landscape, got " + to_string(L.regime));
  if (n <= 0 || r < 1) throw ConfigError("need n > 0 and r >= 1");
  SuppressionStatement s;
  s.center = *L.b_star;
  s.radius = *L.suppression_radius;
  s.claim = "expected number of eigenvalues in the disk decays exponentially in n";
  s.error_order = "K_n(x,y) = O(n^{-(1-gamma)/2} e^{-c n}) on the disk";
  return s;
}

PredictionReport predict(const Landscape& L, int n, int r, double x_min, double x_max, int points) {
  if (L.regime == Regime::Critical || L.regime == Regime::JumpingOutlier)
    throw ConfigError("no prediction in the " + to_string(L.regime) + " regime");
  if (n <= 0 || r < 1 || 4 * r >= n) throw ConfigError("need r >= 1 and r < n/4");
  PredictionReport rep;
  rep.regime = L.regime;
  rep.n = n;
  rep.r = r;
  if (L.regime == Regime::Subcritical) {
    rep.suppression = predict_subcritical(L, n, r);
    rep.error_order = rep.suppression->error_order;
    return rep;
  }
  if (points < 2 || points > 2000 || !(x_min < x_max)) throw ConfigError("grid needs x_min < x_max and 2..2000 points");
  rep.x_min = x_min;
  rep.x_max = x_max;
  rep.error_order = kKernelError;
  for (int i = 0; i < points; ++i) {
    const double x = x_min + (x_max - x_min) * i / (points - 1);
    rep.density.push_back({x, n * predict_outlier_density(L, n, r, x)});
  }
  for (int i = 0; i + 1 < points; ++i)
    rep.integrated_mass += 0.5 * (rep.density[i].value + rep.density[i + 1].value) * (rep.density[i + 1].x - rep.density[i].x);
  if (r == 1) rep.law_r1 = predict_outlier_law_r1(L, n);
  return rep;
}

}  // namespace outlier
