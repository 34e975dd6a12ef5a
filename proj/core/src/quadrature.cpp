#include "modalkit/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "modalkit/errors.hpp"

namespace modalkit::quadrature {

namespace {

Rule compute_rule(int n) {
  // Newton iteration on Legendre polynomials, symmetric pairs.
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) < 1e-15) break;
    }
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    r.weights[n - 1 - i] = r.weights[i];
  }
  return r;
}

} // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  static std::map<int, Rule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n) {
  const Rule& r = gauss_legendre(n);
  const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += r.weights[i] * f(xm + xl * r.nodes[i]);
  return acc * xl;
}

double integrate_semi_infinite(const std::function<double(double)>& f, double scale, int n) {
  if (!(scale > 0.0)) throw DomainError("integrate_semi_infinite: scale must be positive");
  const Rule& r = gauss_legendre(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * (r.nodes[i] + 1.0);  // map (-1,1) -> (0,1)
    const double omt = 1.0 - t;
    const double x = scale * t / omt;
    const double jac = scale / (omt * omt);
    acc += 0.5 * r.weights[i] * f(x) * jac;
  }
  return acc;
}

} // namespace modalkit::quadrature
