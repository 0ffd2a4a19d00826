#include "outlier/potential.hpp"

#include <algorithm>
#include <cmath>

#include "outlier/error.hpp"

namespace outlier {

Potential::Potential(std::vector<double> coeffs) : poly_(coeffs) {
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw ConfigError("potential coefficients must be finite");
  }
  const int d = poly_.degree();
  if (d < 2 || d % 2 != 0)
    throw ConfigError("potential must have even degree >= 2, got degree " + std::to_string(d));
  if (poly_.coeff(d) <= 0.0) throw ConfigError("potential leading coefficient must be positive");
}

Potential Potential::shifted(double t) const {
  const Polynomial q = poly_.shifted(t);
  return Potential(std::vector<double>(q.coeffs().begin(), q.coeffs().end()));
}

bool Potential::is_convex(Interval domain) const {
  const Polynomial v2 = poly_.derivative(2);
  if (v2.degree() == 0) return v2.coeff(0) >= 0.0;

  double scale = 0.0;
  for (double c : v2.coeffs()) scale = std::max(scale, std::abs(c));
  const double tol = 1e-12 * scale;

  std::vector<double> pts;
  for (double x : v2.real_roots()) {
    if (x > domain.lo && x < domain.hi) pts.push_back(x);
  }
  std::vector<double> probes;
  if (std::isfinite(domain.lo)) probes.push_back(domain.lo);
  if (std::isfinite(domain.hi)) probes.push_back(domain.hi);

  // One probe strictly inside every gap between consecutive roots (and the
  // domain ends); V'' has constant sign on each gap.
  std::vector<double> edges;
  edges.push_back(std::isfinite(domain.lo) ? domain.lo
                                           : (pts.empty() ? (std::isfinite(domain.hi) ? domain.hi - 2.0 : -1.0)
                                                          : pts.front() - 1.0));
  edges.insert(edges.end(), pts.begin(), pts.end());
  edges.push_back(std::isfinite(domain.hi) ? domain.hi
                                           : (pts.empty() ? edges.front() + 2.0 : pts.back() + 1.0));
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) probes.push_back(0.5 * (edges[i] + edges[i + 1]));

  return std::all_of(probes.begin(), probes.end(), [&](double x) { return v2(x) >= -tol; });
}

}  // namespace outlier
