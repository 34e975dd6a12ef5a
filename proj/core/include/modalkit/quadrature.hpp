#pragma once

#include <functional>
#include <vector>

namespace modalkit::quadrature {

struct Rule {
  std::vector<double> nodes;   // on (-1, 1)
  std::vector<double> weights;
};

//! Gauss-Legendre rule with n nodes; cached, thread-safe.
const Rule& gauss_legendre(int n);

//! Integral of f over [a, b] with an n-node Gauss-Legendre rule.
double integrate(const std::function<double(double)>& f, double a, double b, int n = 128);

//! Integral of f over [0, inf) through the rational map x = s t / (1 - t),
//! n-node Gauss-Legendre on the mapped interval. The scale s should sit
//! near the integrand's mass; callers integrating x^k e^{-b x} style tails
//! pass s ~ max(1, k/b).
double integrate_semi_infinite(const std::function<double(double)>& f, double scale, int n = 256);

} // namespace modalkit::quadrature
