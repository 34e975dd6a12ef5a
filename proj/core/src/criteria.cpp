#include "modalkit/criteria.hpp"

#include <cmath>

#include "modalkit/moments.hpp"

namespace modalkit::criteria {

using kernels::RadialProfile;

namespace {

double log_abs_checked(double x, const char* what) {
  if (std::fabs(x) < 1e-150)
    throw DegenerateKernelError(std::string(what) + " vanishes; criterion undefined");
  return std::log(std::fabs(x));
}

//! log of (B_{d,q}^{2(d+2)} V_{d,1}^{2q})^{1/(d+2q+2)}
double log_rk_criterion(const RadialProfile& g) {
  const int d = g.d(), q = g.q();
  const double lb = log_abs_checked(moments::moment_B(g, q), "B_{d,q}");
  const double lv = std::log(moments::moment_V(g, 1));
  return (2.0 * (d + 2) * lb + 2.0 * q * lv) / (d + 2.0 * q + 2.0);
}

double log_pk_criterion(const RadialProfile& g, int d) {
  const int q = g.q();
  const double lb = log_abs_checked(moments::moment_B(g, q), "B_{1,q}");
  const double lv1 = std::log(moments::moment_V(g, 1));
  const double lv0 = std::log(moments::moment_V(g, 0));
  return (6.0 * lb + 2.0 * q * lv1 + (d - 1.0) * (2.0 * lb + 2.0 * q * lv0)) /
         (d + 2.0 * q + 2.0);
}

} // namespace

CriterionValue rk_criterion(const RadialProfile& profile) {
  return {std::exp(log_rk_criterion(profile)), profile.d(), profile.q(),
          CriterionKind::rk_amse};
}

double amse_ratio(const RadialProfile& profile, int d, int q) {
  if (profile.d() != d || profile.q() != q)
    throw ShapeError("amse_ratio: profile and reference must share (d, q)");
  return std::exp(log_rk_criterion(profile) -
                  log_rk_criterion(kernels::biweight_opt_profile(d, q)));
}

CriterionValue pk_criterion(const RadialProfile& factor, int d) {
  if (factor.d() != 1) throw ShapeError("pk_criterion: factor must be univariate");
  if (d < 1) throw DomainError("pk_criterion: dimension must be >= 1");
  return {std::exp(log_pk_criterion(factor, d)), d, factor.q(), CriterionKind::pk_amse};
}

double pk_amse_ratio_q2(const RadialProfile& factor, int d) {
  if (factor.d() != 1) throw ShapeError("pk_amse_ratio_q2: factor must be univariate");
  if (factor.q() != 2)
    throw DomainError("pk_amse_ratio_q2: density-free comparison exists for q = 2 only");
  if (d < 1) throw DomainError("pk_amse_ratio_q2: dimension must be >= 1");
  const RadialProfile ref = kernels::biweight_opt_profile(d, 2);
  const double lb = log_abs_checked(moments::moment_B(factor, 2), "B_{1,2}");
  const double lv1 = std::log(moments::moment_V(factor, 1));
  const double lv0 = std::log(moments::moment_V(factor, 0));
  const double lbr = log_abs_checked(moments::moment_B(ref, 2), "B_{d,2}");
  const double lvr = std::log(moments::moment_V(ref, 1));
  const double ln_num = (6.0 * d + 4.0) * std::log(2.0) + 6.0 * lb + 4.0 * lv1 +
                        (d - 1.0) * (2.0 * lb + 4.0 * lv0);
  const double ln_den =
      (2.0 * d + 8.0) * std::log(moments::v_d(d)) + 2.0 * (d + 2.0) * lbr + 4.0 * lvr;
  return std::exp((ln_num - ln_den) / (d + 6.0));
}

CriterionValue pk_lower_bound(int d, int q) {
  if (d < 1) throw DomainError("pk_lower_bound: dimension must be >= 1");
  const RadialProfile gb = kernels::biweight_opt_profile(1, q);
  const RadialProfile ge = kernels::epanechnikov_profile(1, q);
  const double lb_b = log_abs_checked(moments::moment_B(gb, q), "B_{1,q}");
  const double lv1_b = std::log(moments::moment_V(gb, 1));
  const double lb_e = log_abs_checked(moments::moment_B(ge, q), "B_{1,q}");
  const double lv0_e = std::log(moments::moment_V(ge, 0));
  const double ln = (6.0 * lb_b + 2.0 * q * lv1_b + (d - 1.0) * (2.0 * lb_e + 2.0 * q * lv0_e)) /
                    (d + 2.0 * q + 2.0);
  return {std::exp(ln), d, q, CriterionKind::pk_lower_bound};
}

double rk_vs_pk_ratio_q2(int d) {
  if (d < 1) throw DomainError("rk_vs_pk_ratio_q2: dimension must be >= 1");
  const RadialProfile gb1 = kernels::biweight_opt_profile(1, 2);
  const RadialProfile ge1 = kernels::epanechnikov_profile(1, 2);
  const RadialProfile gbd = kernels::biweight_opt_profile(d, 2);
  const double lb_b = std::log(moments::moment_B(gb1, 2));
  const double lv1_b = std::log(moments::moment_V(gb1, 1));
  const double lb_e = std::log(moments::moment_B(ge1, 2));
  const double lv0_e = std::log(moments::moment_V(ge1, 0));
  const double lb_rk = log_abs_checked(moments::moment_B(gbd, 2), "B_{d,2}");
  const double lv1_rk = std::log(moments::moment_V(gbd, 1));
  const double ln_num = (6.0 * d + 4.0) * std::log(2.0) + 6.0 * lb_b + 4.0 * lv1_b +
                        (d - 1.0) * (2.0 * lb_e + 4.0 * lv0_e);
  const double ln_den = (2.0 * d + 8.0) * std::log(moments::v_d(d)) +
                        2.0 * (d + 2.0) * lb_rk + 4.0 * lv1_rk;
  return std::exp((ln_num - ln_den) / (d + 6.0));
}

CriterionValue singular_criterion(const RadialProfile& kernel, int p, int q) {
  if (kernel.d() != 1) throw ShapeError("singular_criterion: kernel must be univariate");
  if (p < 1 || p % 2 == 0) throw DomainError("singular_criterion: p must be odd and positive");
  if (q <= p || q % 2 != 0) throw InvalidOrderError("singular_criterion: q must be even and > p");
  const double bq = moments::moment_B(kernel, q);
  // relaxed moment condition: symmetric kernels kill the odd moments, the
  // even ones in [p, q-1] must vanish and the q-th must not
  for (int i = p; i < q; ++i) {
    if (i % 2 != 0) continue;
    const double bi = moments::moment_B(kernel, i);
    if (std::fabs(bi) > 1e-8 * (1.0 + std::fabs(bq)))
      throw InadmissibleKernelError(
          "singular_criterion: moment " + std::to_string(i) + " = " + std::to_string(bi), i);
  }
  if (std::fabs(bq) < 1e-10)
    throw InadmissibleKernelError("singular_criterion: vanishing order-q moment", q);
  const double lv = std::log(moments::moment_V(kernel, 1));
  const double ln = (6.0 * std::log(std::fabs(bq)) + 2.0 * q * lv) / (2.0 * q + 3.0);
  return {std::exp(ln), 1, q, CriterionKind::singular_al2pe};
}

std::vector<CatalogEntry> named_univariate_catalog() {
  const double pi = M_PI;
  const double rpi = std::sqrt(pi);
  std::vector<CatalogEntry> cat;
  auto add = [&](std::string name, RadialProfile p, std::map<int, double> b, double v11) {
    cat.push_back({std::move(name), std::move(p), std::move(b), v11});
  };
  add("biweight", kernels::biweight_opt_profile(1, 2),
      {{2, 1.0 / 14}, {4, 1.0 / 42}, {6, 5.0 / 462}}, 15.0 / 14);
  add("triweight", kernels::triweight_profile(),
      {{2, 1.0 / 18}, {4, 1.0 / 66}, {6, 5.0 / 858}}, 35.0 / 22);
  add("tricube", kernels::tricube_profile(),
      {{2, 35.0 / 486}, {4, 1.0 / 44}, {6, 1.0 / 104}}, 210.0 / 187);
  // 4th/6th moments of the cosine kernel are tabulated as 4-place decimals
  add("cosine", kernels::cosine_profile(),
      {{2, 0.5 - 4.0 / (pi * pi)}, {4, 0.0394}, {6, 0.0214}}, pi * pi * pi * pi / 128.0);
  add("epanechnikov", kernels::epanechnikov_profile(1, 2),
      {{2, 0.1}, {4, 3.0 / 70}, {6, 1.0 / 42}}, 0.75);
  add("triangle", kernels::triangle_profile(),
      {{2, 1.0 / 12}, {4, 1.0 / 30}, {6, 1.0 / 56}}, 1.0);
  add("gaussian", kernels::gaussian_profile(1, 2),
      {{2, 0.5}, {4, 1.5}, {6, 7.5}}, 1.0 / (8.0 * rpi));
  add("logistic", kernels::logistic_profile(),
      {{2, pi * pi / 6.0}, {4, 7.0 * std::pow(pi, 4) / 30.0}, {6, 31.0 * std::pow(pi, 6) / 42.0}},
      1.0 / 60);
  add("sech", kernels::sech_profile(), {{2, 0.5}, {4, 2.5}, {6, 30.5}}, pi / 24.0);
  add("laplace", kernels::laplace_profile(1, 2), {{2, 1.0}, {4, 12.0}, {6, 360.0}}, 0.125);
  add("biweight-q4", kernels::biweight_opt_profile(1, 4),
      {{4, -1.0 / 66}, {6, -5.0 / 429}}, 525.0 / 88);
  add("epanechnikov-q4", kernels::epanechnikov_profile(1, 4), {{4, -1.0 / 42}}, 75.0 / 16);
  add("gaussian-q4", kernels::gaussian_profile(1, 4), {{4, -1.5}}, 55.0 / (128.0 * rpi));
  add("laplace-q4", kernels::laplace_profile(1, 4), {{4, -21.6}}, 313.0 / 1600);
  add("biweight-q6", kernels::biweight_opt_profile(1, 6), {{6, 1.0 / 286}}, 2205.0 / 128);
  add("epanechnikov-q6", kernels::epanechnikov_profile(1, 6), {{6, 5.0 / 858}}, 3675.0 / 256);
  add("gaussian-q6", kernels::gaussian_profile(1, 6), {{6, 7.5}}, 7105.0 / (8192.0 * rpi));
  add("laplace-q6", kernels::laplace_profile(1, 6),
      {{6, 196200.0 / 149}}, 5572345.0 / 22733824);
  return cat;
}

} // namespace modalkit::criteria
