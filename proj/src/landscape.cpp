#include "outlier/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "outlier/error.hpp"

namespace outlier {

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::Supercritical: return "Supercritical";
    case Regime::Subcritical: return "Subcritical";
    case Regime::Critical: return "Critical";
    case Regime::JumpingOutlier: return "JumpingOutlier";
  }
  return "Unknown";
}

double critical_a(const EquilibriumMeasure& em) {
  const double half_dv = 0.5 * em.potential().derivative()(em.band().beta);
  const double gp = em.g_prime_at_beta();
  if (std::abs(half_dv - gp) > 1e-6 * std::max(1.0, std::abs(half_dv)))
    throw MathError("equilibrium inconsistency: V'(beta)/2 and g'(beta) disagree");
  return half_dv;
}

cplx eval_P(const EquilibriumMeasure& em, double a, double l2, int which, cplx z) {
  const cplx v = em.potential().eval(z);
  const cplx g = em.g(z);
  switch (which) {
    case 1: return -v + 2.0 * g + em.l1();
    case 2: return -v + a * z + g + l2;
    case 3: return a * z - g - em.l1() + l2;
    default: throw ConfigError("effective potential index must be 1, 2 or 3");
  }
}

double eval_P_real(const EquilibriumMeasure& em, double a, double l2, int which, double x) {
  const double v = em.potential().eval(x);
  const double g = em.re_g(x);
  switch (which) {
    case 1: return -v + 2.0 * g + em.l1();
    case 2: return -v + a * x + g + l2;
    case 3: return a * x - g - em.l1() + l2;
    default: throw ConfigError("effective potential index must be 1, 2 or 3");
  }
}

namespace {

double p2_prime(const EquilibriumMeasure& em, double a, double x) {
  return -em.potential().derivative()(x) + a + em.g_prime(cplx(x, 0.0)).real();
}

double p2_second(const EquilibriumMeasure& em, double x) {
  return -em.potential().derivative(2)(x) + em.g_second(cplx(x, 0.0)).real();
}

// Root of a decreasing-through-zero function on [lo, hi] with f(lo) > 0 > f(hi):
// bisection to a tight bracket, then Newton steps kept inside it.
template <class F, class DF>
double bracketed_root(F&& f, DF&& df, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-9 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 20; ++it) {
    const double step = f(x) / df(x);
    const double next = x - step;
    if (!std::isfinite(next) || next < lo - 1e-9 || next > hi + 1e-9) break;
    x = next;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

double raw_p2(const EquilibriumMeasure& em, double a, double x) { return eval_P_real(em, a, 0.0, 2, x); }

}  // namespace

double find_b_star(const EquilibriumMeasure& em, double a) {
  if (!(a > 0.0)) throw ConfigError("b*: source strength a must be positive");
  const double ac = critical_a(em);
  if (a >= ac) throw ConfigError("b* undefined for a >= a_c");
  const Band& b = em.band();
  auto f = [&](double x) { return em.g_prime(cplx(x, 0.0)).real() - a; };
  auto df = [&](double x) { return em.g_second(cplx(x, 0.0)).real(); };
  const double lo = b.beta + 1e-10 * (1.0 + b.halfwidth());
  if (f(lo) <= 0.0) return lo;
  double dist = 1.0;
  while (f(b.beta + dist) >= 0.0) {
    dist *= 2.0;
    if (dist > 1e12) throw MathError("b*: failed to bracket g'(z) = a");
  }
  return bracketed_root(f, df, lo, b.beta + dist);
}

double x_max(const EquilibriumMeasure& em, double a) {
  const double ac = 0.5 * em.potential().derivative()(em.band().beta);
  // g' <= a_c right of the band, so V' > a + a_c + 1 forces P2' < -1.
  const Polynomial shifted_dv = em.potential().derivative() - Polynomial({a + ac + 1.0});
  double x = em.band().beta + 1.0;
  for (double root : shifted_dv.real_roots()) x = std::max(x, root + 1e-6 * (1.0 + std::abs(root)));
  return x;
}

AStar find_a_star(const EquilibriumMeasure& em, double a, double lower) {
  const double xm = x_max(em, a);
  if (!(lower < xm)) throw MathError("P2 has no interior maximum");
  const double d0 = 1e-9 * (1.0 + em.band().halfwidth());
  const double span = xm - lower;
  constexpr int kGrid = 1500;

  std::vector<double> xs(kGrid), ds(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    xs[i] = lower + d0 * std::pow(span / d0, static_cast<double>(i) / (kGrid - 1));
    ds[i] = p2_prime(em, a, xs[i]);
  }

  AStar out;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> values;
  for (int i = 0; i + 1 < kGrid; ++i) {
    if (ds[i] > 0.0 && ds[i + 1] <= 0.0) {
      const double x = bracketed_root([&](double t) { return p2_prime(em, a, t); },
                                      [&](double t) { return p2_second(em, t); }, xs[i], xs[i + 1]);
      out.local_maxima.push_back(x);
      values.push_back(raw_p2(em, a, x));
      if (values.back() > best) {
        best = values.back();
        out.location = x;
      }
    }
  }
  if (out.local_maxima.empty()) throw MathError("P2 has no interior maximum");
  int ties = 0;
  for (double v : values) ties += (std::abs(v - best) <= 1e-9) ? 1 : 0;
  out.unique = ties == 1;
  return out;
}

double fix_l2(const EquilibriumMeasure& em, double a, Regime regime, double point) {
  switch (regime) {
    case Regime::Supercritical:
    case Regime::JumpingOutlier:
      return -raw_p2(em, a, point);
    case Regime::Subcritical:
      return em.l1() - (a * point - em.re_g(point));
    case Regime::Critical:
      return -raw_p2(em, a, em.band().beta);
  }
  return 0.0;
}

double curvature(const EquilibriumMeasure& em, double a_star) {
  const double c = em.potential().derivative(2)(a_star) - em.g_second(cplx(a_star, 0.0)).real();
  if (!(c > 1e-10)) throw MathError("degenerate maximum: P2''(a*) vanishes");
  return c;
}

namespace {

// which = 2: P2(z) - P2(a*) ; which = 3: P3(z) - P3(b*), accurate near the base.
cplx delta_p(const Landscape& L, int which, double base, cplx u) {
  const Polynomial& v = L.em.potential().polynomial();
  // V(base + u) - V(base) = sum_{k>=1} V^(k)(base) u^k / k!
  cplx dv = 0.0, uk = 1.0;
  double fact = 1.0;
  for (int k = 1; k <= v.degree(); ++k) {
    uk *= u;
    fact *= k;
    dv += v.derivative(k)(base) / fact * uk;
  }
  const cplx dg = L.em.g_increment(base, u);
  if (which == 2) return -dv + L.a * u + dg;
  return L.a * u - dg;
}

double kappa_of(int n, int r) {
  if (n <= 0 || r <= 0) throw ConfigError("local coordinate needs n > 0 and r > 0");
  const double kappa = static_cast<double>(r) / n;
  if (!(kappa < 0.25)) throw ConfigError("local coordinate needs r/n < 1/4");
  return kappa;
}

// rho^2 / u^2 near the base point, sign chosen so it tends to the positive curvature.
cplx chart_q(const Landscape& L, int which, double base, double curv, cplx u) {
  if (std::abs(u) < 1e-7) return curv;
  const cplx d = delta_p(L, which, base, u);
  return (which == 2 ? -2.0 : 2.0) * d / (u * u);
}

bool chart_ok(const Landscape& L, int which, double base, double curv, double radius) {
  constexpr int kAngles = 64;
  for (int k = 0; k < kAngles; ++k) {
    const double t = 2.0 * std::numbers::pi * k / kAngles;
    const cplx u = std::polar(radius, t);
    if (chart_q(L, which, base, curv, u).real() <= 0.0) return false;
  }
  // rho must be monotone along the real segment.
  constexpr int kReal = 100;
  for (int k = 1; k <= kReal; ++k) {
    const double x = radius * k / kReal;
    if (which == 2) {
      if (p2_prime(L.em, L.a, base - x) <= 0.0 || p2_prime(L.em, L.a, base + x) >= 0.0) return false;
    } else {
      const double gpl = L.a - L.em.g_prime(cplx(base - x, 0.0)).real();
      const double gpr = L.a - L.em.g_prime(cplx(base + x, 0.0)).real();
      if (gpl >= 0.0 || gpr <= 0.0) return false;
    }
  }
  return true;
}

double certify_chart(const Landscape& L, int which, double base, double curv) {
  double radius = 0.9 * (base - L.band().beta);
  for (int it = 0; it < 40; ++it, radius *= 0.5) {
    if (chart_ok(L, which, base, curv, radius)) return radius;
  }
  throw MathError("could not certify a local chart");
}

double certify_suppression(const Landscape& L) {
  const double bs = *L.b_star;
  double radius = 0.5 * (bs - L.band().beta);
  constexpr int kAngles = 256;
  for (int it = 0; it < 40; ++it, radius *= 0.5) {
    bool ok = true;
    for (int k = 0; k < kAngles && ok; ++k) {
      const cplx z = bs + std::polar(radius, 2.0 * std::numbers::pi * k / kAngles);
      const double re = (z.imag() == 0.0) ? L.P(2, z.real()) : L.P(2, z).real();
      ok = re < 0.0;
    }
    // Re P2 is harmonic in the disk, so the boundary maximum bounds the interior.
    if (ok) return radius;
  }
  throw MathError("could not certify a suppression disk around b*");
}

}  // namespace

Landscape classify(const EquilibriumMeasure& em, double a) {
  if (!(a > 0.0)) throw ConfigError("classify requires a > 0 (reflect V(z) -> V(-z) for negative a)");
  Landscape L{em};
  L.a = a;
  L.a_c = critical_a(em);
  L.x_max = x_max(em, a);
  const double beta = em.band().beta;

  if (std::abs(a - L.a_c) < 1e-8 * std::max(1.0, L.a_c)) {
    L.regime = Regime::Critical;
    L.l2 = fix_l2(em, a, Regime::Critical, beta);
    return L;
  }

  double lower = beta;
  if (a < L.a_c) {
    const double bs = find_b_star(em, a);
    L.b_star = bs;
    lower = bs;
    // P2 and P3 share l2, so the comparison is l2-free. P2 < -1 slope beyond
    // x_max, so the supremum over [b*, inf) sits at b* or at an interior maximum.
    const double p3b = a * bs - em.re_g(bs) - em.l1();
    double sup = raw_p2(em, a, bs);
    std::vector<double> maxima;
    try {
      const AStar as = find_a_star(em, a, bs);
      maxima = as.local_maxima;
      for (double x : maxima) sup = std::max(sup, raw_p2(em, a, x));
    } catch (const MathError&) {
    }
    if (sup < p3b - 1e-9) {
      L.regime = Regime::Subcritical;
      L.l2 = fix_l2(em, a, Regime::Subcritical, bs);
      L.chart_radius = certify_chart(L, 3, bs, -em.g_second(cplx(bs, 0.0)).real());
      L.suppression_radius = certify_suppression(L);
      return L;
    }
    if (std::abs(sup - p3b) <= 1e-9) {
      L.regime = Regime::JumpingOutlier;
      L.l2 = fix_l2(em, a, Regime::JumpingOutlier, maxima.empty() ? bs : maxima.front());
      return L;
    }
  }

  const AStar as = find_a_star(em, a, lower);
  L.a_star = as.location;
  if (!as.unique) {
    L.regime = Regime::JumpingOutlier;
    L.l2 = fix_l2(em, a, Regime::JumpingOutlier, as.location);
    return L;
  }
  L.regime = Regime::Supercritical;
  L.l2 = fix_l2(em, a, Regime::Supercritical, as.location);
  L.curvature_c = curvature(em, as.location);
  L.chart_radius = certify_chart(L, 2, as.location, *L.curvature_c);
  return L;
}

cplx to_local_super(const Landscape& L, int n, int r, cplx z) {
  if (L.regime != Regime::Supercritical) throw ConfigError("to_local_super needs a supercritical landscape");
  const double kappa = kappa_of(n, r);
  const cplx u = z - *L.a_star;
  if (std::abs(u) > *L.chart_radius * (1.0 + 1e-12)) throw ConfigError("outside local chart");
  const cplx q = chart_q(L, 2, *L.a_star, *L.curvature_c, u);
  if (q.real() <= 0.0) throw ConfigError("outside local chart");
  return u * std::sqrt(q) / std::sqrt(kappa);
}

cplx from_local_super(const Landscape& L, int n, int r, cplx zeta) {
  if (L.regime != Regime::Supercritical) throw ConfigError("from_local_super needs a supercritical landscape");
  const double kappa = kappa_of(n, r);
  const double as = *L.a_star, c = *L.curvature_c;
  const cplx target = zeta * std::sqrt(kappa);
  cplx z = as + zeta * std::sqrt(kappa / c);
  for (int it = 0; it < 60; ++it) {
    const cplx u = z - as;
    if (std::abs(u) > *L.chart_radius) z = as + u * (*L.chart_radius / std::abs(u));
    const cplx rho = to_local_super(L, n, r, z) * std::sqrt(kappa);
    cplx drho = std::sqrt(c);
    if (std::abs(rho) > 1e-8) {
      const cplx p2p = -L.em.potential().polynomial().derivative()(z) + L.a + L.em.g_prime(z);
      drho = -p2p / rho;
    }
    const cplx step = (rho - target) / drho;
    z -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

cplx to_local_sub(const Landscape& L, int n, int r, cplx z) {
  if (L.regime != Regime::Subcritical) throw ConfigError("to_local_sub needs a subcritical landscape");
  const double kappa = kappa_of(n, r);
  const double bs = *L.b_star;
  const cplx u = z - bs;
  if (std::abs(u) > *L.chart_radius * (1.0 + 1e-12)) throw ConfigError("outside local chart");
  const double curv = -L.em.g_second(cplx(bs, 0.0)).real();
  const cplx q = chart_q(L, 3, bs, curv, u);
  if (q.real() <= 0.0) throw ConfigError("outside local chart");
  return u * std::sqrt(q) / (cplx(0.0, 1.0) * std::sqrt(kappa));
}

}  // namespace outlier
