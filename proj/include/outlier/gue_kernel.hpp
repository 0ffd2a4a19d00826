#pragma once

#include <complex>
#include <vector>

namespace outlier {

/// Monic degree-k polynomial orthogonal for exp(-r zeta^2 / 2):
/// p_{k+1} = zeta p_k - (k/r) p_{k-1}, p_0 = 1. Requires k <= 200.
double hermite(int r, int k, double zeta);

/// Squared norm of hermite(r, j, .) under exp(-r zeta^2 / 2):
/// r^(-j-1/2) j! sqrt(2 pi).
///
/// The printed literature value r^(j-1/2) j! sqrt(2 pi) has the wrong sign in
/// the exponent of r; substituting u = sqrt(r) zeta into the probabilists'
/// Hermite norm gives the form used here, and the test suite checks it by
/// quadrature.
double norm_k(int r, int j);

/// Correlation kernel of the r x r GUE with weight exp(-r zeta^2 / 2)
/// centered at zeta0, in Christoffel-Darboux form without the 1/k_{r-1}
/// normalization:
///   [H_r(x) H_{r-1}(y) - H_{r-1}(x) H_r(y)] / (x - y) * exp(-r x^2/4 - r y^2/4)
/// (arguments shifted by zeta0). Hermite values are carried with a separate
/// binary exponent so large r does not overflow.
class GueKernel {
 public:
  explicit GueKernel(int r, double zeta0 = 0.0);

  int r() const { return r_; }
  double zeta0() const { return zeta0_; }

  double operator()(double zx, double zy) const;
  // Mean eigenvalue density, normalized to integrate to 1.
  double density(double zeta) const;

 private:
  int r_;
  double zeta0_;
  double norm_;  // norm_k(r, r-1)
};

/// g-function of the GUE as printed:
///   -(zeta/4) sqrt(zeta^2-4) + log(zeta + sqrt(zeta^2-4)) + zeta^2/2 + ell_H/2,
/// cut on (-inf, 2]. Throws ConfigError on [-2, 2].
std::complex<double> g_h(std::complex<double> zeta);

/// The log transform of the semicircle law on [-2, 2], g_h(zeta) - zeta^2/4,
/// which behaves like log(zeta) at infinity.
std::complex<double> g_h_log(std::complex<double> zeta);

double ell_h();

/// Coefficients c_1..c_K with g_h_log(zeta - zeta0) - log(zeta) + sum_j c_j zeta^-j = O(zeta^-K-1).
/// Equal to M_j / j with M_j the j-th moment of the semicircle shifted to zeta0.
/// Requires K <= 16; the truncated series is verified against g_h_log at
/// large zeta and MathError("series extraction failed") is thrown on a
/// residual above 1e-8.
std::vector<double> ch_coeffs(double zeta0, int K);

}  // namespace outlier
