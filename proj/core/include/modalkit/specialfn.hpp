#pragma once

#include "modalkit/errors.hpp"
#include "modalkit/polynomial.hpp"

namespace modalkit::specialfn {

//! Gamma function; nonpositive integer arguments raise DomainError.
double gamma_fn(double x);

//! log |Gamma(x)| with the same pole checks as gamma_fn.
double log_gamma(double x);

//! Rising factorial (x)_m = x (x+1) ... (x+m-1); (x)_0 = 1.
double pochhammer(double x, unsigned m);

//! Binomial coefficient extended to real arguments,
//! Gamma(x+1) / (Gamma(y+1) Gamma(x-y+1)).
double gen_binomial(double x, double y);

//! Jacobi polynomial P_n^{(alpha,beta)}(x) for alpha, beta > -3.
//! Negative-integer beta (down to -2) is handled through the classical
//! reduction onto P_{n-m}^{(alpha,m)}; everything else uses the three-term
//! recurrence in n.
double jacobi(unsigned n, double alpha, double beta, double x);

//! Coefficients of P_n^{(alpha,beta)} as a polynomial in x.
Polynomial jacobi_poly(unsigned n, double alpha, double beta);

//! Generalized Laguerre polynomial L_n^{(alpha)}(x).
double laguerre(unsigned n, double alpha, double x);

//! Coefficients of L_n^{(alpha)} as a polynomial in x.
Polynomial laguerre_poly(unsigned n, double alpha);

//! Probabilists' Hermite polynomial He_n(z); n capped at 12.
double hermite_prob(unsigned n, double z);

inline constexpr unsigned kHermiteMaxOrder = 12;

//! Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

//! CDF of Student's t distribution with (possibly fractional) dof.
double student_t_cdf(double t, double dof);

} // namespace modalkit::specialfn
