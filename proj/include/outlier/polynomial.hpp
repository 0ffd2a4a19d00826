#pragma once

#include <complex>
#include <span>
#include <vector>

namespace outlier {

/// Dense real polynomial c_0 + c_1 z + ... + c_d z^d, lowest degree first.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs);

  // Degree of the highest nonzero coefficient; the zero polynomial has degree 0.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coeffs() const { return coeffs_; }
  double coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_[k] : 0.0;
  }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

  template <class T>
  T operator()(T z) const {
    T acc = T(coeffs_.back());
    for (auto k = coeffs_.size() - 1; k-- > 0;) acc = acc * z + T(coeffs_[k]);
    return acc;
  }

  Polynomial derivative(int order = 1) const;
  // q(z) = p(z - t).
  Polynomial shifted(double t) const;
  // Real roots, ascending, each listed once. Found from the companion matrix
  // and polished by Newton.
  std::vector<double> real_roots() const;

  friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator-(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(double s, const Polynomial& p);

 private:
  void trim();
  std::vector<double> coeffs_;
};

}  // namespace outlier
