#include "modalkit/specialfn.hpp"

#include <cmath>
#include <string>

namespace modalkit::specialfn {

namespace {

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && std::nearbyint(x) == x;
}

void check_finite(double x, const char* where) {
  if (!std::isfinite(x)) throw DomainError(std::string(where) + ": non-finite argument");
}

//! beta <= -1 integer reduction: P_n^{(a,-m)}(x) for n >= m reduces to a
//! multiple of ((x+1)/2)^m P_{n-m}^{(a,m)}(x) with classical parameters.
double jacobi_negative_beta(unsigned n, double alpha, int m, double x);

double jacobi_recurrence(unsigned n, double alpha, double beta, double x) {
  if (n == 0) return 1.0;
  double pm1 = 1.0;
  double p = 0.5 * (alpha - beta) + 0.5 * (alpha + beta + 2.0) * x;
  for (unsigned k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double a1 = 2.0 * kk * (kk + alpha + beta) * (2.0 * kk + alpha + beta - 2.0);
    const double a2 = (2.0 * kk + alpha + beta - 1.0) * (alpha * alpha - beta * beta);
    const double a3 = (2.0 * kk + alpha + beta - 1.0) * (2.0 * kk + alpha + beta) *
                      (2.0 * kk + alpha + beta - 2.0);
    const double a4 = 2.0 * (kk + alpha - 1.0) * (kk + beta - 1.0) * (2.0 * kk + alpha + beta);
    if (a1 == 0.0) throw NumericError("jacobi: degenerate recurrence for these parameters");
    const double next = ((a2 + a3 * x) * p - a4 * pm1) / a1;
    pm1 = p;
    p = next;
  }
  return p;
}

double jacobi_negative_beta(unsigned n, double alpha, int m, double x) {
  if (static_cast<int>(n) < m)
    throw DomainError("jacobi: negative integer beta requires n >= -beta");
  const unsigned um = static_cast<unsigned>(m);
  const double scale = std::exp(log_gamma(n + alpha + 1.0) - log_gamma(n + alpha + 1.0 - m)) *
                       std::exp(log_gamma(n - m + 1.0) - log_gamma(n + 1.0));
  return scale * std::pow(0.5 * (x + 1.0), m) * jacobi_recurrence(n - um, alpha, m, x);
}

} // namespace

double gamma_fn(double x) {
  check_finite(x, "gamma_fn");
  if (is_nonpositive_integer(x))
    throw DomainError("gamma_fn: pole at x = " + std::to_string(x));
  return std::tgamma(x);
}

double log_gamma(double x) {
  check_finite(x, "log_gamma");
  if (is_nonpositive_integer(x))
    throw DomainError("log_gamma: pole at x = " + std::to_string(x));
  return std::lgamma(x);
}

double pochhammer(double x, unsigned m) {
  check_finite(x, "pochhammer");
  double acc = 1.0;
  for (unsigned i = 0; i < m; ++i) acc *= x + static_cast<double>(i);
  return acc;
}

double gen_binomial(double x, double y) {
  check_finite(x, "gen_binomial");
  check_finite(y, "gen_binomial");
  // Integer y: falling-factorial product, valid also across gamma poles of x.
  if (y >= 0.0 && std::nearbyint(y) == y && y < 1e6) {
    const unsigned k = static_cast<unsigned>(y);
    double acc = 1.0;
    for (unsigned i = 0; i < k; ++i) acc *= (x - static_cast<double>(i)) / (static_cast<double>(i) + 1.0);
    return acc;
  }
  return gamma_fn(x + 1.0) / (gamma_fn(y + 1.0) * gamma_fn(x - y + 1.0));
}

double jacobi(unsigned n, double alpha, double beta, double x) {
  check_finite(alpha, "jacobi");
  check_finite(beta, "jacobi");
  check_finite(x, "jacobi");
  if (alpha <= -3.0 || beta <= -3.0)
    throw DomainError("jacobi: parameters below supported range (> -3)");
  if (n == 0) return 1.0;
  if (beta <= -1.0 && std::nearbyint(beta) == beta)
    return jacobi_negative_beta(n, alpha, static_cast<int>(-beta), x);
  if (alpha <= -1.0 && std::nearbyint(alpha) == alpha) {
    // reflect: P_n^{(a,b)}(x) = (-1)^n P_n^{(b,a)}(-x)
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * jacobi_negative_beta(n, beta, static_cast<int>(-alpha), -x);
  }
  return jacobi_recurrence(n, alpha, beta, x);
}

Polynomial jacobi_poly(unsigned n, double alpha, double beta) {
  if (alpha <= -1.0 || beta <= -1.0)
    throw DomainError("jacobi_poly: classical parameters (> -1) required");
  if (n == 0) return Polynomial::constant(1.0);
  Polynomial pm1 = Polynomial::constant(1.0);
  Polynomial p({0.5 * (alpha - beta), 0.5 * (alpha + beta + 2.0)});
  for (unsigned k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double a1 = 2.0 * kk * (kk + alpha + beta) * (2.0 * kk + alpha + beta - 2.0);
    const double a2 = (2.0 * kk + alpha + beta - 1.0) * (alpha * alpha - beta * beta);
    const double a3 = (2.0 * kk + alpha + beta - 1.0) * (2.0 * kk + alpha + beta) *
                      (2.0 * kk + alpha + beta - 2.0);
    const double a4 = 2.0 * (kk + alpha - 1.0) * (kk + beta - 1.0) * (2.0 * kk + alpha + beta);
    Polynomial next = (Polynomial({a2, a3}) * p - pm1 * a4) * (1.0 / a1);
    pm1 = p;
    p = next;
  }
  return p;
}

double laguerre(unsigned n, double alpha, double x) {
  check_finite(alpha, "laguerre");
  check_finite(x, "laguerre");
  if (n == 0) return 1.0;
  double lm1 = 1.0;
  double l = 1.0 + alpha - x;
  for (unsigned k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double next = ((2.0 * kk + 1.0 + alpha - x) * l - (kk + alpha) * lm1) / (kk + 1.0);
    lm1 = l;
    l = next;
  }
  return l;
}

Polynomial laguerre_poly(unsigned n, double alpha) {
  if (n == 0) return Polynomial::constant(1.0);
  Polynomial lm1 = Polynomial::constant(1.0);
  Polynomial l({1.0 + alpha, -1.0});
  for (unsigned k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    Polynomial next = (Polynomial({2.0 * kk + 1.0 + alpha, -1.0}) * l - lm1 * (kk + alpha)) *
                      (1.0 / (kk + 1.0));
    lm1 = l;
    l = next;
  }
  return l;
}

double hermite_prob(unsigned n, double z) {
  check_finite(z, "hermite_prob");
  if (n > kHermiteMaxOrder)
    throw DomainError("hermite_prob: order " + std::to_string(n) + " above cap " +
                      std::to_string(kHermiteMaxOrder));
  if (n == 0) return 1.0;
  double hm1 = 1.0;
  double h = z;
  for (unsigned k = 1; k < n; ++k) {
    const double next = z * h - static_cast<double>(k) * hm1;
    hm1 = h;
    h = next;
  }
  return h;
}

namespace {

//! Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete_beta: continued fraction did not converge");
}

} // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete_beta: a, b must be positive");
  if (x < 0.0 || x > 1.0) throw DomainError("incomplete_beta: x outside [0,1]");
  if (x == 0.0 || x == 1.0) return x;
  const double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(ln_front) * beta_cf(a, b, x) / a;
  return 1.0 - std::exp(ln_front) * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw DomainError("student_t_cdf: dof must be positive");
  check_finite(t, "student_t_cdf");
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

} // namespace modalkit::specialfn
