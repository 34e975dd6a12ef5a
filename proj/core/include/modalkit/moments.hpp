#pragma once

#include <map>
#include <vector>

#include "modalkit/kernels.hpp"

namespace modalkit::moments {

//! Surface area factor b_d = 2 pi^{d/2} / Gamma(d/2).
double b_d(int d);

//! v_d = b_{d,(2,0,...,0)} = 2 pi^{d/2} / (d Gamma(d/2)).
double v_d(int d);

//! Multivariate geometric constant b_{d,i}; zero when any index is odd.
double geom_constant(int d, const std::vector<int>& multi_index);

//! B_{d,i}(G) = int_0^inf x^{d-1+i} G(x) dx, closed-form evaluation.
double moment_B(const kernels::RadialProfile& profile, int i);

//! V_{d,l}(G) = int_0^inf x^{d-1} G^{(l)}(x)^2 dx, l in {0,1}.
double moment_V(const kernels::RadialProfile& profile, int l);

//! Quadrature cross-check paths (Gauss-Legendre; see Rule sizes below).
double moment_B_quadrature(const kernels::RadialProfile& profile, int i, int nodes = 0);
double moment_V_quadrature(const kernels::RadialProfile& profile, int l, int nodes = 0);

inline constexpr int kNodesTruncated = 128;
inline constexpr int kNodesTail = 256;

enum class Provenance { closed_form, quadrature };

struct MomentReport {
  std::map<int, double> b_d_i;
  double v_d_0 = 0.0;
  double v_d_1 = 0.0;
  std::map<int, Provenance> b_provenance;
  Provenance v0_provenance = Provenance::closed_form;
  Provenance v1_provenance = Provenance::closed_form;
  double est_abs_error = 0.0;  // quadrature refinement delta, quadrature entries only
};

//! Moments B_{d,i} for even i up to q+2 plus V_{d,0}, V_{d,1}.
MomentReport report(const kernels::RadialProfile& profile);

//! The hierarchy closed forms as displayed, one function per family and
//! functional; B/V at the profile's own order q.
namespace hierarchy_closed_form {
double B_biweight(int d, int q);
double V0_biweight(int d, int q);
double V1_biweight(int d, int q);
double B_epanechnikov(int d, int q);
double V0_epanechnikov(int d, int q);
double V1_epanechnikov(int d, int q);
double B_gaussian(int d, int q);
double V0_gaussian(int d, int q);
double V1_gaussian(int d, int q);  // q in {2,4,6}
double B_laplace(int d, int q);    // q in {2,4}; q=6 for d in {1,2,3}
double V0_laplace(int d, int q);
double V1_laplace(int d, int q);
} // namespace hierarchy_closed_form

} // namespace modalkit::moments
