#include "outlier/oracle.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "outlier/error.hpp"

namespace outlier {
namespace {

using Real = boost::multiprecision::mpfr_float;
using RealMatrix = std::vector<std::vector<Real>>;

std::mutex& precision_mutex() {
  static std::mutex m;
  return m;
}

// Sets the MPFR default precision for the lifetime of the scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(int bits) : lock_(precision_mutex()), saved_(Real::default_precision()) {
    Real::default_precision(static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1);
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  std::lock_guard<std::mutex> lock_;
  unsigned saved_;
};

// Gauss-Legendre rule on [-1, 1] by Newton on the three-term recurrence.
void gauss_legendre(int m, int bits, std::vector<Real>& nodes, std::vector<Real>& weights) {
  nodes.assign(m, Real(0));
  weights.assign(m, Real(0));
  const Real tol = boost::multiprecision::ldexp(Real(1), -bits + 8);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    Real x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    Real dp;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1, p1 = x;
      for (int k = 2; k <= m; ++k) {
        Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1);
      const Real dx = p1 / dp;
      x -= dx;
      if (abs(dx) < tol) break;
    }
    Real p0 = 1, p1 = x;
    for (int k = 2; k <= m; ++k) {
      Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1);
    const Real w = 2 / ((1 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[m - 1 - i] = x;
    weights[i] = w;
    weights[m - 1 - i] = w;
  }
}

// Inverse by LU with partial pivoting; returns false on a singular pivot.
bool invert(const RealMatrix& a, RealMatrix& inv) {
  const int n = static_cast<int>(a.size());
  RealMatrix lu = a;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (abs(lu[i][k]) > abs(lu[piv][k])) piv = i;
    if (lu[piv][k] == 0) return false;
    std::swap(lu[k], lu[piv]);
    std::swap(perm[k], perm[piv]);
    for (int i = k + 1; i < n; ++i) {
      lu[i][k] /= lu[k][k];
      for (int j = k + 1; j < n; ++j) lu[i][j] -= lu[i][k] * lu[k][j];
    }
  }
  inv.assign(n, std::vector<Real>(n, Real(0)));
  for (int col = 0; col < n; ++col) {
    std::vector<Real> y(n);
    for (int i = 0; i < n; ++i) {
      y[i] = (perm[i] == col) ? Real(1) : Real(0);
      for (int j = 0; j < i; ++j) y[i] -= lu[i][j] * y[j];
    }
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) y[i] -= lu[i][j] * y[j];
      y[i] /= lu[i][i];
    }
    for (int i = 0; i < n; ++i) inv[i][col] = y[i];
  }
  return true;
}

}  // namespace

struct OracleKernel::Impl {
  int n = 0, r = 0, bits = 0, nodes_per_panel = 0, nodes = 0;
  double a = 0.0;
  Gauge gauge = Gauge::Standard;
  double lo = 0.0, hi = 0.0;
  double residual = 0.0;
  std::vector<double> coeffs;
  std::vector<Real> gl_nodes, gl_weights;
  RealMatrix ginv;  // ginv[k][j]

  Real potential(const Real& x) const {
    Real acc = coeffs.back();
    for (auto k = coeffs.size() - 1; k-- > 0;) acc = acc * x + coeffs[k];
    return acc;
  }

  // Quadrature moments over [from, to]: A[p] = int x^p e^{-nV}, B[p] = int x^p e^{-n(V - a x)}.
  void moments(double from, double to, std::vector<Real>& A, std::vector<Real>& B) const {
    A.assign(2 * n - 1, Real(0));
    B.assign(r > 0 ? n + r - 1 : 0, Real(0));
    const int panels = std::max(1, static_cast<int>(std::ceil((to - from) / panel_width())));
    for (int p = 0; p < panels; ++p) {
      const Real left = Real(from) + (Real(to) - Real(from)) * p / panels;
      const Real half = (Real(to) - Real(from)) / (2 * panels);
      for (int i = 0; i < nodes_per_panel; ++i) {
        const Real x = left + half * (gl_nodes[i] + 1);
        const Real wa = half * gl_weights[i] * exp(-n * potential(x));
        const Real wb = r > 0 ? Real(wa * exp(n * a * x)) : Real(0);
        Real xp = 1;
        for (std::size_t q = 0; q < A.size(); ++q) {
          A[q] += wa * xp;
          if (q < B.size()) B[q] += wb * xp;
          xp *= x;
        }
      }
    }
  }

  double panel_width() const { return 0.1; }

  RealMatrix gram(const std::vector<Real>& A, const std::vector<Real>& B) const {
    RealMatrix g(n, std::vector<Real>(n));
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) g[j][k] = (k < n - r) ? A[j + k] : B[j + k - (n - r)];
    return g;
  }
};

OracleKernel OracleKernel::build(const Potential& V, double a, int n, int r, OracleOptions opts) {
  if (n < 1 || n > 32) throw ConfigError("oracle supports 1 <= n <= 32");
  if (r < 0 || r > 4 || r > n) throw ConfigError("oracle supports 0 <= r <= min(4, n)");
  if (opts.precision_bits < 192) throw ConfigError("oracle precision must be at least 192 bits");
  if (opts.nodes_per_panel < 8) throw ConfigError("oracle needs at least 8 nodes per panel");
  if (!std::isfinite(a)) throw ConfigError("source strength must be finite");

  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->r = r;
  impl->a = a;
  impl->bits = opts.precision_bits;
  impl->gauge = opts.gauge;
  impl->nodes_per_panel = opts.nodes_per_panel;
  impl->coeffs.assign(V.coeffs().begin(), V.coeffs().end());

  // Truncation interval: for each weight family, the log of its largest Gram
  // integrand (max over the power p <= 2n-2) must drop 2^(-bits/2) below that
  // family's own peak.
  auto log_integrand = [&](double x, double tilt) {
    const double ax = std::abs(x);
    return (2.0 * n - 2.0) * std::max(0.0, std::log(std::max(ax, 1e-300))) - n * V.eval(x) + n * tilt * x;
  };
  double bound = 1.0;
  for (double c : V.coeffs()) bound += std::abs(c);
  bound = 10.0 * (bound + std::abs(a));
  const int grid = static_cast<int>(std::ceil(2.0 * bound / 0.005));
  const double drop = 0.5 * opts.precision_bits * std::numbers::ln2 + 10.0;
  double lo = bound, hi = -bound;
  std::vector<double> tilts{0.0};
  if (r > 0) tilts.push_back(a);
  for (double tilt : tilts) {
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) peak = std::max(peak, log_integrand(-bound + 2.0 * bound * i / grid, tilt));
    if (log_integrand(-bound, tilt) > peak - drop || log_integrand(bound, tilt) > peak - drop)
      throw ConfigError("oracle tail bound cannot be met on a finite domain");
    for (int i = 0; i <= grid; ++i) {
      const double x = -bound + 2.0 * bound * i / grid;
      if (log_integrand(x, tilt) >= peak - drop) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  }
  impl->lo = lo - 0.05;
  impl->hi = hi + 0.05;

  PrecisionScope scope(opts.precision_bits);
  gauss_legendre(opts.nodes_per_panel, opts.precision_bits, impl->gl_nodes, impl->gl_weights);
  const int min_nodes = 8 * (n + V.degree() * n);
  const int panels = std::max(static_cast<int>(std::ceil((impl->hi - impl->lo) / impl->panel_width())),
                              (min_nodes + opts.nodes_per_panel - 1) / opts.nodes_per_panel);
  // Stretch the interval so panel widths stay uniform.
  impl->hi = impl->lo + panels * impl->panel_width();
  impl->nodes = panels * opts.nodes_per_panel;

  std::vector<Real> A, B;
  impl->moments(impl->lo, impl->hi, A, B);
  const RealMatrix g = impl->gram(A, B);
  if (!invert(g, impl->ginv)) throw MathError("Gram matrix is singular at this precision; raise precision");

  Real worst = 0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      Real acc = (i == k) ? Real(-1) : Real(0);
      for (int j = 0; j < n; ++j) acc += g[i][j] * impl->ginv[j][k];
      worst = std::max(worst, Real(abs(acc)));
    }
  impl->residual = worst.convert_to<double>();
  if (worst > boost::multiprecision::ldexp(Real(1), -opts.precision_bits / 4))
    throw MathError("Gram solve residual too large; raise precision");
  return OracleKernel(std::move(impl));
}

double OracleKernel::kernel(double x, double y) const {
  const Impl& im = *impl_;
  if (x < im.lo || x > im.hi || y < im.lo || y > im.hi) throw ConfigError("point outside the oracle domain");
  PrecisionScope scope(im.bits);
  const int n = im.n, r = im.r;
  const Real X = x, Y = y;
  const Real vx = im.potential(X), vy = im.potential(Y);
  Real wx, wy;
  if (im.gauge == Gauge::Standard) {
    wx = exp(-n * vx);
    wy = 1;
  } else {
    wx = exp(-n * vx / 2);
    wy = exp(-n * vy / 2);
  }
  const Real tilt = r > 0 ? Real(exp(n * im.a * X)) : Real(1);

  std::vector<Real> gx(n), fy(n);
  Real p = wx;
  for (int k = 0; k < n - r; ++k, p *= X) gx[k] = p;
  p = wx * tilt;
  for (int k = n - r; k < n; ++k, p *= X) gx[k] = p;
  p = wy;
  for (int j = 0; j < n; ++j, p *= Y) fy[j] = p;

  Real acc = 0;
  for (int j = 0; j < n; ++j) {
    Real t = 0;
    for (int k = 0; k < n; ++k) t += gx[k] * im.ginv[k][j];
    acc += t * fy[j];
  }
  return acc.convert_to<double>();
}

double OracleKernel::expected_count(double lo, double hi) const {
  const Impl& im = *impl_;
  lo = std::max(lo, im.lo);
  hi = std::min(hi, im.hi);
  if (!(lo < hi)) return 0.0;
  PrecisionScope scope(im.bits);
  std::vector<Real> A, B;
  im.moments(lo, hi, A, B);
  const RealMatrix g = im.gram(A, B);
  Real acc = 0;
  for (int k = 0; k < im.n; ++k)
    for (int j = 0; j < im.n; ++j) acc += im.ginv[k][j] * g[j][k];
  return acc.convert_to<double>();
}

int OracleKernel::n() const { return impl_->n; }
int OracleKernel::r() const { return impl_->r; }
double OracleKernel::a() const { return impl_->a; }
int OracleKernel::precision_bits() const { return impl_->bits; }
int OracleKernel::quadrature_nodes() const { return impl_->nodes; }
double OracleKernel::domain_lo() const { return impl_->lo; }
double OracleKernel::domain_hi() const { return impl_->hi; }
double OracleKernel::gram_residual() const { return impl_->residual; }

}  // namespace outlier
