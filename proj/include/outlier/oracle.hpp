#pragma once

#include <memory>

#include "outlier/potential.hpp"

namespace outlier {

// Which diagonal conjugation the kernel is evaluated in. Diagonal values,
// counts and correlation determinants agree between the two.
enum class Gauge {
  Standard,     // f_j(y) = y^j, g_k(x) carries the whole weight
  Symmetrized,  // weight exp(-n V) split evenly between f_j and g_k
};

struct OracleOptions {
  int precision_bits = 256;
  Gauge gauge = Gauge::Standard;
  int nodes_per_panel = 32;
};

/// Exact correlation kernel of the n x n source ensemble with r eigenvalues
/// of the source equal to a, realised as a biorthogonal ensemble:
///   f_j(x) = x^j,                              j = 0..n-1
///   g_k(x) = x^k exp(-n V(x)),                 k = 0..n-r-1
///   g_k(x) = x^k exp(-n (V(x) - a x)),         k = 0..r-1
///   K_n(x, y) = sum_{j,k} g_k(x) (G^-1)_{kj} f_j(y),  G_{jk} = int f_j g_k.
/// The Gram matrix is assembled and inverted in MPFR arithmetic; evaluation
/// returns doubles. Immutable after build. Evaluations serialize on the
/// process-wide MPFR precision setting.
class OracleKernel {
 public:
  // n <= 32, 0 <= r <= min(4, n), precision_bits >= 192. Throws ConfigError on
  // bad parameters and MathError("raise precision") when the Gram solve
  // residual exceeds 2^(-precision/4).
  static OracleKernel build(const Potential& V, double a, int n, int r, OracleOptions opts = {});

  double kernel(double x, double y) const;
  double mean_density(double x) const { return kernel(x, x) / n(); }
  // int_lo^hi K_n(x, x) dx, computed as tr(G^-1 G[lo, hi]) from Gram moments
  // restricted to the interval.
  double expected_count(double lo, double hi) const;

  int n() const;
  int r() const;
  double a() const;
  int precision_bits() const;
  int quadrature_nodes() const;
  double domain_lo() const;
  double domain_hi() const;
  double gram_residual() const;

 private:
  struct Impl;
  explicit OracleKernel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace outlier
