#include "outlier/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace outlier {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

void Polynomial::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

Polynomial Polynomial::derivative(int order) const {
  std::vector<double> c = coeffs_;
  for (int o = 0; o < order; ++o) {
    if (c.size() <= 1) return Polynomial{};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
    c = std::move(d);
  }
  return Polynomial(std::move(c));
}

Polynomial Polynomial::shifted(double t) const {
  // Horner in polynomial arithmetic: p(z - t) = (...(c_d (z-t) + c_{d-1})(z-t) + ...).
  std::vector<double> acc{coeffs_.back()};
  for (auto k = coeffs_.size() - 1; k-- > 0;) {
    std::vector<double> next(acc.size() + 1, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i];
      next[i] -= t * acc[i];
    }
    next[0] += coeffs_[k];
    acc = std::move(next);
  }
  return Polynomial(std::move(acc));
}

std::vector<double> Polynomial::real_roots() const {
  const int d = degree();
  if (d < 1) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -coeffs_[i] / coeffs_[d];
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);

  const Polynomial dp = derivative();
  double scale = 1.0;
  for (int i = 0; i < d; ++i) scale = std::max(scale, std::abs(coeffs_[i] / coeffs_[d]));

  std::vector<double> roots;
  for (int i = 0; i < d; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    // Multiple roots come back as small complex clusters.
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) continue;
    double x = z.real();
    for (int it = 0; it < 30; ++it) {
      const double fx = (*this)(x);
      const double dfx = dp(x);
      if (dfx == 0.0 || fx == 0.0) break;
      const double step = fx / dfx;
      if (!std::isfinite(step) || std::abs(step) > 1e-3 * scale) break;
      x -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double x : roots) {
    if (unique.empty() || std::abs(x - unique.back()) > 1e-7 * std::max(1.0, std::abs(x)))
      unique.push_back(x);
  }
  return unique;
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  std::vector<double> c(std::max(p.coeffs_.size(), q.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = p.coeff(static_cast<int>(k)) + q.coeff(static_cast<int>(k));
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& p, const Polynomial& q) { return p + (-1.0) * q; }

Polynomial operator*(double s, const Polynomial& p) {
  std::vector<double> c = p.coeffs_;
  for (double& x : c) x *= s;
  return Polynomial(std::move(c));
}

}  // namespace outlier
