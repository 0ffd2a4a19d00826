#include "outlier/equilibrium.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "outlier/error.hpp"

namespace outlier {
namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Chebyshev mean (1/pi) int_0^pi f(m + w cos theta) dtheta, exact for
// polynomials of degree < 2 * nodes.
template <class F>
double chebyshev_mean(double m, double w, int nodes, F&& f) {
  double acc = 0.0;
  for (int k = 1; k <= nodes; ++k) {
    const double theta = (2.0 * k - 1.0) * kPi / (2.0 * nodes);
    acc += f(m + w * std::cos(theta), std::cos(theta));
  }
  return acc / nodes;
}

struct NewtonState {
  double m;
  double u;  // log halfwidth
};

// Residual and Jacobian of the endpoint conditions for the potential with
// derivative dv (and second derivative d2v).
struct System {
  std::array<double, 2> f;
  std::array<std::array<double, 2>, 2> jac;
};

System endpoint_system(const Polynomial& dv, const Polynomial& d2v, int nodes, const NewtonState& st) {
  const double w = std::exp(st.u);
  System s{};
  s.f[0] = chebyshev_mean(st.m, w, nodes, [&](double x, double) { return dv(x); });
  s.f[1] = 0.5 * chebyshev_mean(st.m, w, nodes, [&](double x, double) { return x * dv(x); }) - 1.0;
  s.jac[0][0] = chebyshev_mean(st.m, w, nodes, [&](double x, double) { return d2v(x); });
  s.jac[0][1] = w * chebyshev_mean(st.m, w, nodes, [&](double x, double c) { return d2v(x) * c; });
  s.jac[1][0] = 0.5 * chebyshev_mean(st.m, w, nodes, [&](double x, double) { return dv(x) + x * d2v(x); });
  s.jac[1][1] = 0.5 * w * chebyshev_mean(st.m, w, nodes, [&](double x, double c) { return (dv(x) + x * d2v(x)) * c; });
  return s;
}

double norm_inf(const std::array<double, 2>& f) { return std::max(std::abs(f[0]), std::abs(f[1])); }

bool newton(const Polynomial& dv, const Polynomial& d2v, int nodes, NewtonState& st, double tol) {
  System s = endpoint_system(dv, d2v, nodes, st);
  for (int it = 0; it < 200; ++it) {
    const double r = norm_inf(s.f);
    if (r < tol) return true;
    const double det = s.jac[0][0] * s.jac[1][1] - s.jac[0][1] * s.jac[1][0];
    if (!std::isfinite(det) || det == 0.0) return false;
    const double dm = (s.jac[1][1] * s.f[0] - s.jac[0][1] * s.f[1]) / det;
    const double du = (-s.jac[1][0] * s.f[0] + s.jac[0][0] * s.f[1]) / det;
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      NewtonState trial{st.m - lambda * dm, st.u - lambda * std::clamp(du, -2.0, 2.0)};
      System ts = endpoint_system(dv, d2v, nodes, trial);
      if (std::isfinite(norm_inf(ts.f)) && norm_inf(ts.f) < (1.0 - 1e-4 * lambda) * r) {
        st = trial;
        s = ts;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) return norm_inf(s.f) < 100.0 * tol;
  }
  return norm_inf(s.f) < tol;
}

}  // namespace

EndpointResiduals endpoint_residuals(const Potential& V, const Band& band) {
  const Polynomial dv = V.derivative();
  const int nodes = V.degree() + 8;
  const double m = band.midpoint(), w = band.halfwidth();
  return {chebyshev_mean(m, w, nodes, [&](double x, double) { return dv(x); }),
          0.5 * chebyshev_mean(m, w, nodes, [&](double x, double) { return x * dv(x); }) - 1.0};
}

Band solve_endpoints(const Potential& V) {
  const Polynomial v = V.polynomial();
  const int nodes = V.degree() + 8;
  constexpr int kSteps = 8;
  for (double q : {1.0, 0.25, 4.0, 0.0625, 16.0}) {
    const Polynomial quad({0.0, 0.0, 0.5 * q});
    NewtonState st{0.0, std::log(2.0 / std::sqrt(q))};
    bool ok = true;
    for (int k = 1; k <= kSteps && ok; ++k) {
      const double t = static_cast<double>(k) / kSteps;
      const Polynomial vt = (1.0 - t) * quad + t * v;
      const double tol = (k == kSteps) ? 2e-15 : 1e-10;
      ok = newton(vt.derivative(), vt.derivative(2), nodes, st, tol);
    }
    if (!ok) continue;
    const double w = std::exp(st.u);
    Band band{st.m - w, st.m + w};
    const EndpointResiduals res = endpoint_residuals(V, band);
    if (std::max(std::abs(res.first), std::abs(res.second)) < 1e-12) return band;
  }
  throw MathError("no single-band solution found");
}

EquilibriumMeasure EquilibriumMeasure::build(const Potential& V, const Band& band, QuadratureOptions opts) {
  if (!(band.alpha < band.beta) || !std::isfinite(band.alpha) || !std::isfinite(band.beta))
    throw ConfigError("band must satisfy alpha < beta");
  if (opts.panels < 1) throw ConfigError("quadrature panels must be positive");

  // h(x) = (1/pi) int [(V'(s) - V'(x)) / (s - x)] ds / sqrt((s-alpha)(beta-s)).
  // With V' = sum_k b_k s^k the difference quotient is sum_k b_k sum_{i+j=k-1} s^i x^j,
  // so the x^j coefficient is sum_k b_k mu_{k-1-j} with Chebyshev moments mu_p.
  const Polynomial dv = V.derivative();
  const int nodes = V.degree() + 8;
  const double m = band.midpoint(), w = band.halfwidth();
  std::vector<double> mu(dv.degree() + 1);
  for (int p = 0; p <= dv.degree(); ++p)
    mu[p] = chebyshev_mean(m, w, nodes, [&](double x, double) { return std::pow(x, p); });
  std::vector<double> hc(std::max(dv.degree(), 1), 0.0);
  for (int k = 1; k <= dv.degree(); ++k)
    for (int j = 0; j <= k - 1; ++j) hc[j] += dv.coeff(k) * mu[k - 1 - j];

  EquilibriumMeasure em(V, band, Polynomial(std::move(hc)), opts);

  const double h_scale = std::max(std::abs(em.h_(band.alpha)), std::abs(em.h_(band.beta)));
  if (em.h_(band.alpha) <= 1e-12 * h_scale || em.h_(band.beta) <= 1e-12 * h_scale)
    throw MathError("non-regular potential: density does not vanish like a square root at the band edge");
  for (int i = 1; i < 400; ++i) {
    const double x = band.alpha + (band.beta - band.alpha) * i / 400.0;
    if (em.h_(x) < 0.0) throw MathError("not single-band: equilibrium density is negative inside the band");
  }

  em.l1_ = V.eval(band.beta) - 2.0 * em.re_g(band.beta);

  // A posteriori single-band check: P1 < 0 off the band out to distance 10.
  const double tol = 1e-9 * std::max(1.0, std::abs(em.l1_));
  for (int k = 0; k <= 120; ++k) {
    const double d = 1e-3 * std::pow(1e4, k / 120.0);
    if (em.re_p1(band.beta + d) > tol || em.re_p1(band.alpha - d) > tol)
      throw MathError("not single-band: effective potential P1 is positive off the band");
  }
  return em;
}

template <class F>
auto EquilibriumMeasure::integrate(cplx focus, F&& f) const {
  using R = decltype(f(0.0, 0.0));
  const double m = band_.midpoint(), w = band_.halfwidth();
  const int panels = opts_.panels;

  std::vector<double> breaks;
  for (int i = 0; i <= panels; ++i) breaks.push_back(kPi * i / panels);

  const double dist = std::abs(focus - cplx(std::clamp(focus.real(), band_.alpha, band_.beta), 0.0));
  if (dist < w) {
    const double theta0 = std::acos(std::clamp((focus.real() - m) / w, -1.0, 1.0));
    // Grade down to the distance of the nearest singularity in the angle variable.
    // On the band itself only a log singularity remains; stop before nodes
    // collide with it in floating point.
    const double floor = std::max(dist > 1e-14 * w ? 1e-15 : 1e-11, 0.1 * std::min(dist / w, std::sqrt(dist / w)));
    for (double step = kPi / panels * 0.25; step > floor; step *= 0.25) {
      if (theta0 - step > 0.0) breaks.push_back(theta0 - step);
      if (theta0 + step < kPi) breaks.push_back(theta0 + step);
    }
    breaks.push_back(theta0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-300; }),
                 breaks.end());
  }

  R acc{};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] <= breaks[i]) continue;
    acc += boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double theta) {
          const double st = std::sin(theta);
          const double s = m + w * std::cos(theta);
          const double weight = h_(s) * w * w * st * st / (2.0 * kPi);
          // beta - s computed without cancellation near the right edge.
          const double gap = 2.0 * w * std::pow(std::sin(0.5 * theta), 2);
          return R(f(s, gap) * weight);
        },
        breaks[i], breaks[i + 1]);
  }
  return acc;
}

double EquilibriumMeasure::density(double s) const {
  if (s <= band_.alpha || s >= band_.beta) return 0.0;
  return h_(s) * std::sqrt((s - band_.alpha) * (band_.beta - s)) / (2.0 * kPi);
}

double EquilibriumMeasure::mass() const {
  // (1/2pi) w^2 int_0^pi h(s) sin^2 theta dtheta, exact by Chebyshev quadrature.
  const double m = band_.midpoint(), w = band_.halfwidth();
  const int nodes = h_.degree() + 8;
  return 0.5 * w * w * chebyshev_mean(m, w, nodes, [&](double x, double c) { return h_(x) * (1.0 - c * c); });
}

cplx EquilibriumMeasure::g(cplx z) const {
  if (z.imag() == 0.0 && z.real() <= band_.beta) throw ConfigError("g: point lies on the branch cut (-inf, beta]");
  const cplx zb = z - band_.beta;
  return integrate(z, [&](double, double gap) { return std::log(zb + gap); });
}

double EquilibriumMeasure::re_g(double x) const {
  const double xb = x - band_.beta;
  return integrate(cplx(x, 0.0), [&](double, double gap) { return std::log(std::abs(xb + gap)); });
}

namespace {
double distance_to_band(cplx z, const Band& b) {
  return std::abs(z - cplx(std::clamp(z.real(), b.alpha, b.beta), 0.0));
}
}  // namespace

cplx EquilibriumMeasure::g_prime(cplx z) const {
  if (distance_to_band(z, band_) < 1e-12) throw ConfigError("g': point too close to support");
  const cplx zb = z - band_.beta;
  return integrate(z, [&](double, double gap) { return 1.0 / (zb + gap); });
}

cplx EquilibriumMeasure::g_second(cplx z) const {
  if (distance_to_band(z, band_) < 1e-12) throw ConfigError("g'': point too close to support");
  const cplx zb = z - band_.beta;
  return integrate(z, [&](double, double gap) { return -1.0 / ((zb + gap) * (zb + gap)); });
}

double EquilibriumMeasure::g_prime_at_beta() const {
  // rho(s)/(beta - s) is bounded in the angle variable: sin^2/(2 sin^2(theta/2)).
  const double m = band_.midpoint(), w = band_.halfwidth();
  double acc = 0.0;
  const int panels = opts_.panels;
  for (int i = 0; i < panels; ++i) {
    acc += boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double theta) {
          const double s = m + w * std::cos(theta);
          return h_(s) * w * std::pow(std::cos(0.5 * theta), 2) * 2.0 / (2.0 * kPi);
        },
        kPi * i / panels, kPi * (i + 1) / panels);
  }
  return acc;
}

namespace {
cplx log1p_c(cplx w) {
  if (std::abs(w) > 1e-3) return std::log(1.0 + w);
  cplx term = w, acc = 0.0;
  for (int k = 1; k < 12; ++k) {
    acc += term / static_cast<double>(k);
    term *= -w;
  }
  return acc;
}
}  // namespace

cplx EquilibriumMeasure::g_increment(double base, cplx u) const {
  if (!(base > band_.beta)) throw ConfigError("g_increment: base point must lie right of the band");
  const double bb = base - band_.beta;
  return integrate(cplx(base, 0.0) + u, [&](double, double gap) { return log1p_c(u / (bb + gap)); });
}

double EquilibriumMeasure::re_p1(double x) const { return -V_.eval(x) + 2.0 * re_g(x) + l1_; }

}  // namespace outlier
