#include "modalkit/moments.hpp"

#include <cmath>

#include "modalkit/quadrature.hpp"
#include "modalkit/specialfn.hpp"

namespace modalkit::moments {

namespace sf = modalkit::specialfn;
using kernels::ProfileForm;
using kernels::RadialProfile;
using specialfn::Polynomial;

namespace {

//! int_0^inf x^k e^{-x^2/2} dx = 2^{(k-1)/2} Gamma((k+1)/2)
double gauss_weight_moment(int k) {
  return std::exp(0.5 * (k - 1) * std::log(2.0) + sf::log_gamma(0.5 * (k + 1)));
}

//! int_0^inf x^k e^{-x^2} dx = Gamma((k+1)/2) / 2
double gauss_sq_weight_moment(int k) {
  return 0.5 * std::exp(sf::log_gamma(0.5 * (k + 1)));
}

//! int_0^inf x^k e^{-x} dx = Gamma(k+1)
double exp_weight_moment(int k) { return std::exp(sf::log_gamma(k + 1.0)); }

//! int_0^inf x^k e^{-2x} dx = Gamma(k+1) / 2^{k+1}
double exp_sq_weight_moment(int k) {
  return std::exp(sf::log_gamma(k + 1.0) - (k + 1) * std::log(2.0));
}

double poly_weighted_moment(const Polynomial& p, int power_shift,
                            double (*weight_moment)(int)) {
  const auto& c = p.coefficients();
  double acc = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] != 0.0) acc += c[j] * weight_moment(power_shift + static_cast<int>(j));
  return acc;
}

double truncated_poly_moment(const Polynomial& p, int power_shift) {
  const auto& c = p.coefficients();
  double acc = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j)
    acc += c[j] / static_cast<double>(power_shift + 1 + static_cast<int>(j));
  return acc;
}

bool has_polynomial_form(const RadialProfile& p) {
  return p.form() == ProfileForm::PolyTruncated || p.form() == ProfileForm::PolyGauss ||
         p.form() == ProfileForm::PolyExp;
}

//! (x)_{2,m} = x (x+2) ... (x+2(m-1)), the step-2 rising product.
double step2_product(double x, int m) {
  double acc = 1.0;
  for (int i = 0; i < m; ++i) acc *= x + 2.0 * i;
  return acc;
}

} // namespace

double b_d(int d) {
  if (d < 1) throw DomainError("b_d: dimension must be >= 1");
  return 2.0 * std::exp(0.5 * d * std::log(M_PI) - sf::log_gamma(0.5 * d));
}

double v_d(int d) { return b_d(d) / d; }

double geom_constant(int d, const std::vector<int>& multi_index) {
  if (static_cast<int>(multi_index.size()) != d)
    throw ShapeError("geom_constant: multi-index length must equal d");
  int total = 0;
  for (int ij : multi_index) {
    if (ij < 0) throw DomainError("geom_constant: negative index");
    if (ij % 2 != 0) return 0.0;
    total += ij;
  }
  double ln = -sf::log_gamma(0.5 * (d + total));
  for (int ij : multi_index) ln += sf::log_gamma(0.5 * (1 + ij));
  return 2.0 * std::exp(ln);
}

double moment_B(const RadialProfile& profile, int i) {
  if (i < 0) throw DomainError("moment_B: negative moment index");
  namespace cf = hierarchy_closed_form;
  const int d = profile.d(), q = profile.q();
  // Displayed hierarchy forms are preferred at the profile's own order;
  // they avoid the cancellation in the term-by-term sums.
  if (i == q) {
    switch (profile.family()) {
      case kernels::ProfileFamily::BiweightOpt: return cf::B_biweight(d, q);
      case kernels::ProfileFamily::Epanechnikov: return cf::B_epanechnikov(d, q);
      case kernels::ProfileFamily::Gaussian: return cf::B_gaussian(d, q);
      default: break;
    }
  }
  switch (profile.form()) {
    case ProfileForm::PolyTruncated:
      return truncated_poly_moment(profile.poly(), d - 1 + i);
    case ProfileForm::PolyGauss:
      return poly_weighted_moment(profile.poly(), d - 1 + i, gauss_weight_moment);
    case ProfileForm::PolyExp:
      return poly_weighted_moment(profile.poly(), d - 1 + i, exp_weight_moment);
    default:
      return moment_B_quadrature(profile, i);
  }
}

double moment_V(const RadialProfile& profile, int l) {
  if (l != 0 && l != 1) throw DomainError("moment_V: l must be 0 or 1");
  const int d = profile.d();
  switch (profile.form()) {
    case ProfileForm::PolyTruncated: {
      const Polynomial g = l == 0 ? profile.poly() : profile.poly().derivative();
      return truncated_poly_moment(g * g, d - 1);
    }
    case ProfileForm::PolyGauss: {
      // G^{(l)} = r(x) e^{-x^2/2}; square gives poly * e^{-x^2}
      const Polynomial& p = profile.poly();
      const Polynomial r =
          l == 0 ? p : p.derivative() - Polynomial::monomial(1.0, 1) * p;
      return poly_weighted_moment(r * r, d - 1, gauss_sq_weight_moment);
    }
    case ProfileForm::PolyExp: {
      const Polynomial& p = profile.poly();
      const Polynomial r = l == 0 ? p : p.derivative() - p;
      return poly_weighted_moment(r * r, d - 1, exp_sq_weight_moment);
    }
    default:
      return moment_V_quadrature(profile, l);
  }
}

double moment_B_quadrature(const RadialProfile& profile, int i, int nodes) {
  const int d = profile.d();
  auto f = [&](double x) { return std::pow(x, d - 1 + i) * profile(x); };
  if (profile.truncated())
    return quadrature::integrate(f, 0.0, profile.support(), nodes > 0 ? nodes : kNodesTruncated);
  double scale = 1.0;
  switch (profile.form()) {
    case ProfileForm::PolyGauss:
      scale = std::max(1.0, std::sqrt(static_cast<double>(d + i + profile.poly().degree())));
      break;
    case ProfileForm::PolyExp:
      scale = std::max(1.0, static_cast<double>(d + i + profile.poly().degree()));
      break;
    default:
      scale = std::max(1.0, static_cast<double>(d + i));
      break;
  }
  return quadrature::integrate_semi_infinite(f, scale, nodes > 0 ? nodes : kNodesTail);
}

double moment_V_quadrature(const RadialProfile& profile, int l, int nodes) {
  const int d = profile.d();
  auto f = [&](double x) {
    const double g = l == 0 ? profile(x) : profile.deriv(x);
    return std::pow(x, d - 1) * g * g;
  };
  if (profile.truncated())
    return quadrature::integrate(f, 0.0, profile.support(), nodes > 0 ? nodes : kNodesTruncated);
  double scale;
  switch (profile.form()) {
    case ProfileForm::PolyGauss:
      scale = std::max(1.0, std::sqrt(0.5 * (d + 2.0 * profile.poly().degree())));
      break;
    case ProfileForm::PolyExp:
      scale = std::max(1.0, 0.5 * (d + 2.0 * profile.poly().degree()));
      break;
    default:
      scale = std::max(1.0, 0.5 * d + 1.0);
      break;
  }
  return quadrature::integrate_semi_infinite(f, scale, nodes > 0 ? nodes : kNodesTail);
}

MomentReport report(const RadialProfile& profile) {
  MomentReport rep;
  const bool closed = has_polynomial_form(profile);
  const Provenance prov = closed ? Provenance::closed_form : Provenance::quadrature;
  for (int i = 0; i <= profile.q() + 2; i += 2) {
    rep.b_d_i[i] = moment_B(profile, i);
    rep.b_provenance[i] = prov;
  }
  rep.v_d_0 = moment_V(profile, 0);
  rep.v_d_1 = moment_V(profile, 1);
  rep.v0_provenance = prov;
  rep.v1_provenance = prov;
  if (!closed) {
    double err = 0.0;
    for (auto& [i, v] : rep.b_d_i)
      err = std::max(err, std::fabs(v - moment_B_quadrature(profile, i, 2 * kNodesTail)));
    err = std::max(err, std::fabs(rep.v_d_0 - moment_V_quadrature(profile, 0, 2 * kNodesTail)));
    err = std::max(err, std::fabs(rep.v_d_1 - moment_V_quadrature(profile, 1, 2 * kNodesTail)));
    rep.est_abs_error = err;
  }
  return rep;
}

namespace hierarchy_closed_form {

namespace {
double sign_q(int q) { return ((q / 2 + 1) % 2 == 0) ? 1.0 : -1.0; }
const double kLnPi = std::log(M_PI);
} // namespace

double B_biweight(int d, int q) {
  return sign_q(q) * 0.5 *
         std::exp(sf::log_gamma(0.5 * (d + q)) + sf::log_gamma(0.5 * (d + q + 4)) -
                  0.5 * d * kLnPi - sf::log_gamma(0.5 * (d + 2 * q + 4)));
}

double V0_biweight(int d, int q) {
  return 8.0 * (3 * d + 4 * q + 4) *
         std::exp(sf::log_gamma(0.5 * (d + q)) + sf::log_gamma(0.5 * (d + q + 4)) - d * kLnPi -
                  2.0 * sf::log_gamma(0.5 * q)) /
         (d * step2_product(d + 2 * q, 3));
}

double V1_biweight(int d, int q) {
  return 16.0 *
         std::exp(sf::log_gamma(0.5 * (d + q + 2)) + sf::log_gamma(0.5 * (d + q + 4)) -
                  d * kLnPi - 2.0 * sf::log_gamma(0.5 * q)) /
         ((d + 2.0) * (d + 2.0 * q + 2.0));
}

double B_epanechnikov(int d, int q) {
  return sign_q(q) * 0.5 *
         std::exp(sf::log_gamma(0.5 * (d + q)) + sf::log_gamma(0.5 * (d + q + 2)) -
                  0.5 * d * kLnPi - sf::log_gamma(0.5 * (d + 2 * q + 2)));
}

double V0_epanechnikov(int d, int q) {
  return 4.0 *
         std::exp(sf::log_gamma(0.5 * (d + q)) + sf::log_gamma(0.5 * (d + q + 2)) - d * kLnPi -
                  2.0 * sf::log_gamma(0.5 * q)) /
         (d * (d + 2.0 * q));
}

double V1_epanechnikov(int d, int q) {
  return 4.0 *
         std::exp(2.0 * sf::log_gamma(0.5 * (d + q + 2)) - d * kLnPi -
                  2.0 * sf::log_gamma(0.5 * q)) /
         (d + 2.0);
}

double B_gaussian(int d, int q) {
  const double sign = ((q / 2 - 1) % 2 == 0) ? 1.0 : -1.0;
  return sign * std::exp(0.5 * (q - 2) * std::log(2.0) + sf::log_gamma(0.5 * (d + q)) -
                         0.5 * d * kLnPi);
}

double V0_gaussian(int d, int q) {
  const double front =
      std::exp(2.0 * sf::log_gamma(0.5 * (d + q)) - (d + q - 1) * std::log(2.0) - d * kLnPi);
  double sum = 0.0;
  for (int i1 = 0; i1 <= q / 2 - 1; ++i1) {
    for (int i2 = 0; i2 <= q / 2 - 1; ++i2) {
      const double sgn = ((i1 + i2) % 2 == 0) ? 1.0 : -1.0;
      sum += sgn *
             std::exp((i1 + i2) * std::log(2.0) + sf::log_gamma(0.5 * d + q - 2 - i1 - i2) -
                      sf::log_gamma(0.5 * (d + q) - i1) - sf::log_gamma(0.5 * (d + q) - i2) -
                      sf::log_gamma(0.5 * q - i1) - sf::log_gamma(0.5 * q - i2) -
                      sf::log_gamma(i1 + 1.0) - sf::log_gamma(i2 + 1.0));
    }
  }
  return front * sum;
}

double V1_gaussian(int d, int q) {
  switch (q) {
    case 2:
      return std::exp(sf::log_gamma(0.5 * d + 2.0) - d * std::log(2.0) - d * kLnPi) / (d + 2.0);
    case 4:
      return (d + 10.0) *
             std::exp(sf::log_gamma(0.5 * (d + 6)) - (d + 3.0) * std::log(2.0) - d * kLnPi) /
             (d + 2.0);
    case 6:
      return (d * d + 26.0 * d + 176.0) *
             std::exp(sf::log_gamma(0.5 * (d + 8)) - (d + 8.0) * std::log(2.0) - d * kLnPi) /
             (d + 2.0);
    default:
      throw DomainError("V1_gaussian: closed form displayed for q in {2,4,6} only");
  }
}

double B_laplace(int d, int q) {
  switch (q) {
    case 2:
      return sf::pochhammer(d, 2) * 0.5 *
             std::exp(sf::log_gamma(0.5 * d) - 0.5 * d * kLnPi);
    case 4:
      return -sf::pochhammer(d, 4) * (2.0 * d + 7.0) * 0.5 *
             std::exp(sf::log_gamma(0.5 * d) - 0.5 * d * kLnPi) / (2.0 * d + 3.0);
    case 6:
      switch (d) {
        case 1: return 196200.0 / 149.0;
        case 2: return 2215080.0 / (307.0 * M_PI);
        case 3: return 1335600.0 / (109.0 * M_PI);
        default: throw DomainError("B_laplace: q=6 closed form displayed for d in {1,2,3} only");
      }
    default:
      throw DomainError("B_laplace: closed form displayed for q in {2,4,6} only");
  }
}

double V0_laplace(int d, int q) {
  switch (q) {
    case 2:
      return std::exp(2.0 * sf::log_gamma(0.5 * d) - (d + 2.0) * std::log(2.0) - d * kLnPi -
                      sf::log_gamma(static_cast<double>(d)));
    case 4:
      return sf::pochhammer(d + 2, 2) * (9.0 * d * d + 73.0 * d + 96.0) *
             std::exp(2.0 * sf::log_gamma(0.5 * d) - (d + 8.0) * std::log(2.0) - d * kLnPi -
                      sf::log_gamma(static_cast<double>(d))) /
             ((2.0 * d + 3.0) * (2.0 * d + 3.0));
    case 6:
      switch (d) {
        case 1: return 4327215.0 / 22733824.0;
        case 2: return 28174335.0 / (193021952.0 * M_PI * M_PI);
        case 3: return 5292791.0 / (389316608.0 * M_PI * M_PI);
        default: throw DomainError("V0_laplace: q=6 closed form displayed for d in {1,2,3} only");
      }
    default:
      throw DomainError("V0_laplace: closed form displayed for q in {2,4,6} only");
  }
}

double V1_laplace(int d, int q) {
  switch (q) {
    case 2:
      return V0_laplace(d, 2);
    case 4:
      return (d + 1.0) * (9.0 * d * d * d + 133.0 * d * d + 534.0 * d + 576.0) *
             std::exp(2.0 * sf::log_gamma(0.5 * d) - (d + 8.0) * std::log(2.0) - d * kLnPi -
                      sf::log_gamma(static_cast<double>(d))) /
             ((2.0 * d + 3.0) * (2.0 * d + 3.0));
    case 6:
      switch (d) {
        case 1: return 5572345.0 / 22733824.0;
        case 2: return 38442103.0 / (193021952.0 * M_PI * M_PI);
        case 3: return 7306271.0 / (389316608.0 * M_PI * M_PI);
        default: throw DomainError("V1_laplace: q=6 closed form displayed for d in {1,2,3} only");
      }
    default:
      throw DomainError("V1_laplace: closed form displayed for q in {2,4,6} only");
  }
}

} // namespace hierarchy_closed_form

} // namespace modalkit::moments
