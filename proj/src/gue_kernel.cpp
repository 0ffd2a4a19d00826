#include "outlier/gue_kernel.hpp"

#include <cmath>
#include <numbers>

#include "outlier/error.hpp"

namespace outlier {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

// Value mantissa * 2^exponent * exp(-r zeta^2 / 4) kept in log-scaled form.
struct Scaled {
  double mantissa = 0.0;
  int exponent = 0;

  double value(double log_weight) const {
    if (mantissa == 0.0) return 0.0;
    return std::copysign(std::exp(std::log(std::abs(mantissa)) + exponent * std::numbers::ln2 + log_weight), mantissa);
  }
};

// H_{k-2}, H_{k-1}, H_k at zeta, sharing one binary exponent.
struct HermiteTail {
  double pm2 = 0.0, pm1 = 0.0, p = 1.0;
  int exponent = 0;
};

HermiteTail hermite_tail(int r, int k, double zeta) {
  HermiteTail t;
  double prev = 0.0, cur = 1.0, prev2 = 0.0;
  int e = 0;
  for (int j = 0; j < k; ++j) {
    const double next = zeta * cur - (static_cast<double>(j) / r) * prev;
    prev2 = prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 0x1p400 || (std::abs(cur) < 0x1p-400 && std::abs(prev) < 0x1p-400 && cur != 0.0)) {
      int shift = 0;
      std::frexp(cur != 0.0 ? cur : prev, &shift);
      cur = std::ldexp(cur, -shift);
      prev = std::ldexp(prev, -shift);
      prev2 = std::ldexp(prev2, -shift);
      e += shift;
    }
  }
  t.pm2 = prev2;
  t.pm1 = prev;
  t.p = cur;
  t.exponent = e;
  return t;
}

}  // namespace

double hermite(int r, int k, double zeta) {
  if (r < 1) throw ConfigError("hermite: r must be positive");
  if (k < 0 || k > 200) throw ConfigError("hermite: degree must lie in [0, 200]");
  const HermiteTail t = hermite_tail(r, k, zeta);
  return std::ldexp(t.p, t.exponent);
}

double norm_k(int r, int j) {
  if (r < 1 || j < 0) throw ConfigError("norm_k: need r >= 1 and j >= 0");
  return std::exp(-(j + 0.5) * std::log(static_cast<double>(r)) + std::lgamma(j + 1.0)) * kSqrt2Pi;
}

GueKernel::GueKernel(int r, double zeta0) : r_(r), zeta0_(zeta0), norm_(0.0) {
  if (r < 1) throw ConfigError("GUE kernel needs r >= 1");
  if (r > 200) throw ConfigError("GUE kernel supports r <= 200");
  norm_ = norm_k(r, r - 1);
}

double GueKernel::operator()(double zx, double zy) const {
  const double x = zx - zeta0_, y = zy - zeta0_;
  const HermiteTail hx = hermite_tail(r_, r_, x);
  const HermiteTail hy = hermite_tail(r_, r_, y);
  const double lw = -0.25 * r_ * (x * x + y * y) + (hx.exponent + hy.exponent) * std::numbers::ln2;
  if (std::abs(zx - zy) < 1e-8) {
    // Confluent form, H_k' = k H_{k-1}: H_r' H_{r-1} - H_{r-1}' H_r at the midpoint.
    const double mid = 0.5 * (x + y);
    const HermiteTail hm = hermite_tail(r_, r_, mid);
    const double num = r_ * hm.pm1 * hm.pm1 - (r_ - 1) * hm.pm2 * hm.p;
    return Scaled{num, 2 * hm.exponent}.value(-0.5 * r_ * mid * mid);
  }
  const double num = hx.p * hy.pm1 - hx.pm1 * hy.p;
  if (num == 0.0) return 0.0;
  return std::copysign(std::exp(std::log(std::abs(num)) + lw), num) / (x - y);
}

double GueKernel::density(double zeta) const { return (*this)(zeta, zeta) / (r_ * norm_); }

double ell_h() { return -1.0 - 2.0 * std::numbers::ln2; }

namespace {
std::complex<double> sqrt_z2m4(std::complex<double> z) { return std::sqrt(z - 2.0) * std::sqrt(z + 2.0); }
}  // namespace

std::complex<double> g_h(std::complex<double> zeta) {
  if (zeta.imag() == 0.0 && zeta.real() >= -2.0 && zeta.real() < 2.0)
    throw ConfigError("g_H: point lies on the branch cut [-2, 2]");
  const std::complex<double> s = sqrt_z2m4(zeta);
  return -zeta / 4.0 * s + std::log(zeta + s) + zeta * zeta / 2.0 + ell_h() / 2.0;
}

std::complex<double> g_h_log(std::complex<double> zeta) { return g_h(zeta) - zeta * zeta / 4.0; }

std::vector<double> ch_coeffs(double zeta0, int K) {
  if (K < 1 || K > 16) throw ConfigError("c^H coefficients: K must lie in [1, 16]");
  // Semicircle moments: m_{2k} = Catalan(k), odd moments vanish.
  std::vector<double> m(K + 1, 0.0);
  double catalan = 1.0;
  for (int k = 0; 2 * k <= K; ++k) {
    m[2 * k] = catalan;
    catalan = catalan * 2.0 * (2.0 * k + 1.0) / (k + 2.0);
  }
  std::vector<double> c(K);
  for (int j = 1; j <= K; ++j) {
    double moment = 0.0, binom = 1.0;
    for (int i = 0; i <= j; ++i) {
      moment += binom * std::pow(zeta0, j - i) * m[i];
      binom = binom * (j - i) / (i + 1.0);
    }
    c[j - 1] = moment / j;
  }

  const double z = 1e3 + std::abs(zeta0);
  double resid = g_h_log(z - zeta0).real() - std::log(z);
  for (int j = K; j >= 1; --j) resid += c[j - 1] / std::pow(z, j);
  if (!(std::abs(resid) < 1e-8)) throw MathError("series extraction failed");
  return c;
}

}  // namespace outlier
