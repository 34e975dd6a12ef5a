#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "modalkit/errors.hpp"

namespace modalkit::specialfn {

//! Dense univariate polynomial, coefficients indexed by monomial degree.
class Polynomial {
public:
  Polynomial() : coeffs_(1, 0.0) {}
  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.assign(1, 0.0);
    trim();
  }

  static Polynomial zero() { return Polynomial(); }
  static Polynomial constant(double c) { return Polynomial({c}); }
  //! c * x^k
  static Polynomial monomial(double c, std::size_t k) {
    std::vector<double> v(k + 1, 0.0);
    v[k] = c;
    return Polynomial(std::move(v));
  }

  const std::vector<double>& coefficients() const { return coeffs_; }
  std::size_t degree() const { return coeffs_.size() - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  double coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }

  //! Horner evaluation.
  double operator()(double x) const {
    double acc = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
    return acc;
  }

  Polynomial derivative() const {
    if (coeffs_.size() == 1) return zero();
    std::vector<double> v(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) v[i - 1] = coeffs_[i] * static_cast<double>(i);
    return Polynomial(std::move(v));
  }

  Polynomial operator+(const Polynomial& o) const {
    std::vector<double> v(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) v[i] += coeffs_[i];
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) v[i] += o.coeffs_[i];
    return Polynomial(std::move(v));
  }

  Polynomial operator-(const Polynomial& o) const { return *this + (o * -1.0); }

  Polynomial operator*(double s) const {
    std::vector<double> v = coeffs_;
    for (double& c : v) c *= s;
    return Polynomial(std::move(v));
  }

  Polynomial operator*(const Polynomial& o) const {
    std::vector<double> v(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      for (std::size_t j = 0; j < o.coeffs_.size(); ++j) v[i + j] += coeffs_[i] * o.coeffs_[j];
    return Polynomial(std::move(v));
  }

  //! Substitute x -> a + b*x^2; returns p(a + b x^2) as a polynomial in x.
  Polynomial compose_affine_square(double a, double b) const {
    Polynomial acc = zero();
    Polynomial base({a, 0.0, b});
    Polynomial pw = constant(1.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      acc = acc + pw * coeffs_[i];
      if (i + 1 < coeffs_.size()) pw = pw * base;
    }
    return acc;
  }

private:
  void trim() {
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  }
  std::vector<double> coeffs_;
};

} // namespace modalkit::specialfn
