#include "modalkit/kernels.hpp"

#include <cmath>
#include <map>

#include "modalkit/specialfn.hpp"

namespace modalkit::kernels {

namespace sf = modalkit::specialfn;

namespace {

constexpr double kTinyRadius = 1e-300;

void check_dq(int d, int q, const char* where) {
  if (d < 1) throw DomainError(std::string(where) + ": dimension must be >= 1");
  if (q < 2 || q % 2 != 0) throw InvalidOrderError(std::string(where) + ": order must be even and >= 2");
  if (q > kMaxOrder)
    throw InvalidOrderError(std::string(where) + ": order above cap " + std::to_string(kMaxOrder));
}

//! b_d^{-1} = Gamma(d/2) / (2 pi^{d/2}), the required zeroth moment.
double inv_bd(int d) {
  return std::exp(sf::log_gamma(0.5 * d) - 0.5 * d * std::log(M_PI)) * 0.5;
}

//! int_0^1 x^{d-1+i} p(x) dx for a truncated polynomial profile.
double truncated_moment(const Polynomial& p, int d, int i) {
  double acc = 0.0;
  const auto& c = p.coefficients();
  for (std::size_t j = 0; j < c.size(); ++j) acc += c[j] / static_cast<double>(d + i + j);
  return acc;
}

} // namespace

double RadialProfile::support() const {
  return truncated() ? 1.0 : std::numeric_limits<double>::infinity();
}

double RadialProfile::effective_radius() const {
  switch (form_) {
    case ProfileForm::PolyTruncated:
    case ProfileForm::AnalyticCosine: return 1.0;
    case ProfileForm::PolyGauss: return 16.0;
    case ProfileForm::PolyExp: return 96.0;
    case ProfileForm::AnalyticLogistic: return 96.0;
    case ProfileForm::AnalyticSech: return 64.0;
  }
  return std::numeric_limits<double>::infinity();
}

std::string RadialProfile::name() const {
  switch (family_) {
    case ProfileFamily::BiweightOpt: return "biweight";
    case ProfileFamily::Epanechnikov: return "epanechnikov";
    case ProfileFamily::Gaussian: return "gaussian";
    case ProfileFamily::Laplace: return "laplace";
    case ProfileFamily::CustomPolynomialTruncated: return "custom";
    case ProfileFamily::Triweight: return "triweight";
    case ProfileFamily::Tricube: return "tricube";
    case ProfileFamily::Cosine: return "cosine";
    case ProfileFamily::Triangle: return "triangle";
    case ProfileFamily::Logistic: return "logistic";
    case ProfileFamily::Sech: return "sech";
  }
  return "?";
}

double RadialProfile::operator()(double x) const {
  switch (form_) {
    case ProfileForm::PolyTruncated:
      return x <= 1.0 ? poly_(x) : 0.0;
    case ProfileForm::PolyGauss:
      return poly_(x) * std::exp(-0.5 * x * x);
    case ProfileForm::PolyExp:
      return poly_(x) * std::exp(-x);
    case ProfileForm::AnalyticCosine:
      return x <= 1.0 ? 0.25 * M_PI * std::cos(0.5 * M_PI * x) : 0.0;
    case ProfileForm::AnalyticLogistic: {
      const double t = std::tanh(0.5 * x);
      return 0.25 * (1.0 - t * t);
    }
    case ProfileForm::AnalyticSech:
      return 0.5 / std::cosh(0.5 * M_PI * x);
  }
  return 0.0;
}

double RadialProfile::deriv(double x) const {
  switch (form_) {
    case ProfileForm::PolyTruncated:
      return x <= 1.0 ? poly_.derivative()(x) : 0.0;
    case ProfileForm::PolyGauss: {
      const double p = poly_(x), dp = poly_.derivative()(x);
      return (dp - x * p) * std::exp(-0.5 * x * x);
    }
    case ProfileForm::PolyExp: {
      const double p = poly_(x), dp = poly_.derivative()(x);
      return (dp - p) * std::exp(-x);
    }
    case ProfileForm::AnalyticCosine:
      return x <= 1.0 ? -0.125 * M_PI * M_PI * std::sin(0.5 * M_PI * x) : 0.0;
    case ProfileForm::AnalyticLogistic: {
      const double t = std::tanh(0.5 * x);
      const double s2 = 1.0 - t * t;
      return -0.25 * s2 * t;
    }
    case ProfileForm::AnalyticSech: {
      const double v = 0.5 * M_PI * x;
      return -0.25 * M_PI * std::tanh(v) / std::cosh(v);
    }
  }
  return 0.0;
}

double RadialProfile::deriv2(double x) const {
  switch (form_) {
    case ProfileForm::PolyTruncated:
      return x <= 1.0 ? poly_.derivative().derivative()(x) : 0.0;
    case ProfileForm::PolyGauss: {
      const double p = poly_(x), dp = poly_.derivative()(x);
      const double d2p = poly_.derivative().derivative()(x);
      return (d2p - 2.0 * x * dp + (x * x - 1.0) * p) * std::exp(-0.5 * x * x);
    }
    case ProfileForm::PolyExp: {
      const double p = poly_(x), dp = poly_.derivative()(x);
      const double d2p = poly_.derivative().derivative()(x);
      return (d2p - 2.0 * dp + p) * std::exp(-x);
    }
    case ProfileForm::AnalyticCosine:
      return x <= 1.0 ? -0.0625 * M_PI * M_PI * M_PI * std::cos(0.5 * M_PI * x) : 0.0;
    case ProfileForm::AnalyticLogistic: {
      const double t = std::tanh(0.5 * x);
      const double s2 = 1.0 - t * t;
      return 0.25 * s2 * (t * t - 0.5 * s2);
    }
    case ProfileForm::AnalyticSech: {
      const double v = 0.5 * M_PI * x;
      const double s = 1.0 / std::cosh(v), t = std::tanh(v);
      return -0.125 * M_PI * M_PI * s * (s * s - t * t);
    }
  }
  return 0.0;
}

RadialProfile biweight_opt_profile(int d, int q) {
  check_dq(d, q, "biweight_opt_profile");
  // coefficients of degrees 0, 2, ..., q+2
  std::vector<double> c(q + 3, 0.0);
  for (int i = 0; i <= q + 2; i += 2) {
    const double sign = ((i / 2) % 2 == 0) ? 1.0 : -1.0;
    const double ln = sf::log_gamma(0.5 * (d + q + 4)) + sf::log_gamma(0.5 * (d + q + i)) -
                      0.5 * d * std::log(M_PI) - sf::log_gamma(0.5 * q) -
                      sf::log_gamma(0.5 * (2 + i)) - sf::log_gamma(0.5 * (d + 2 + i)) -
                      sf::log_gamma(0.5 * (q + 4 - i));
    c[i] = sign * std::exp(ln);
  }
  return RadialProfile(ProfileFamily::BiweightOpt, ProfileForm::PolyTruncated, d, q,
                       Polynomial(std::move(c)));
}

RadialProfile epanechnikov_profile(int d, int q) {
  check_dq(d, q, "epanechnikov_profile");
  const double sign = ((q / 2 + 1) % 2 == 0) ? 1.0 : -1.0;
  const double pref = sign * std::exp(sf::log_gamma(0.5 * (d + q) + 1.0) -
                                      0.5 * d * std::log(M_PI) - sf::log_gamma(0.5 * q + 1.0));
  Polynomial jac = sf::jacobi_poly(q / 2 - 1, 1.0, 0.5 * d).compose_affine_square(-1.0, 2.0);
  Polynomial poly = jac * Polynomial({1.0, 0.0, -1.0}) * pref;
  return RadialProfile(ProfileFamily::Epanechnikov, ProfileForm::PolyTruncated, d, q,
                       std::move(poly));
}

RadialProfile gaussian_profile(int d, int q) {
  check_dq(d, q, "gaussian_profile");
  const double norm = std::pow(2.0 * M_PI, -0.5 * d);
  Polynomial poly =
      sf::laguerre_poly(q / 2 - 1, 0.5 * d).compose_affine_square(0.0, 0.5) * norm;
  return RadialProfile(ProfileFamily::Gaussian, ProfileForm::PolyGauss, d, q, std::move(poly));
}

RadialProfile laplace_profile(int d, int q) {
  check_dq(d, q, "laplace_profile");
  const int m = q / 2;
  Eigen::MatrixXd M(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) M(r, c) = sf::pochhammer(d + 2 * r, 2 * c);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(0) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw NumericError("laplace_profile: singular moment system (d=" + std::to_string(d) +
                       ", q=" + std::to_string(q) + ")");
  const Eigen::MatrixXd Minv = lu.inverse();
  const double cond = M.cwiseAbs().rowwise().sum().maxCoeff() *
                      Minv.cwiseAbs().rowwise().sum().maxCoeff();
  if (cond > 1e12)
    throw NumericError("laplace_profile: ill-conditioned moment system, cond ~ " +
                       std::to_string(cond));
  const Eigen::VectorXd b = Minv * rhs;
  const double norm = std::exp(sf::log_gamma(0.5 * d) - 0.5 * d * std::log(M_PI) -
                               sf::log_gamma(static_cast<double>(d))) * 0.5;
  std::vector<double> c(q - 1, 0.0);
  for (int j = 0; j < m; ++j) c[2 * j] = b(j) * norm;
  return RadialProfile(ProfileFamily::Laplace, ProfileForm::PolyExp, d, q,
                       Polynomial(std::move(c)));
}

RadialProfile custom_truncated_profile(int d, int q, std::vector<double> coefficients) {
  check_dq(d, q, "custom_truncated_profile");
  Polynomial p(coefficients);
  constexpr double tol = 1e-6;
  const double b0 = truncated_moment(p, d, 0);
  if (std::fabs(b0 - inv_bd(d)) > tol)
    throw InadmissibleKernelError("custom_truncated_profile: normalization moment off by " +
                                      std::to_string(b0 - inv_bd(d)),
                                  0);
  for (int i = 1; i <= q - 2; ++i) {
    const double bi = truncated_moment(p, d, i);
    // odd moments need not vanish for a radial profile; only the even ones enter
    if (i % 2 == 0 && std::fabs(bi) > tol)
      throw InadmissibleKernelError(
          "custom_truncated_profile: moment " + std::to_string(i) + " = " + std::to_string(bi), i);
  }
  if (std::fabs(truncated_moment(p, d, q)) <= tol)
    throw InadmissibleKernelError("custom_truncated_profile: vanishing order-q moment", q);
  return RadialProfile(ProfileFamily::CustomPolynomialTruncated, ProfileForm::PolyTruncated, d, q,
                       std::move(p));
}

RadialProfile make_catalog_profile(ProfileFamily fam) {
  switch (fam) {
    case ProfileFamily::Triweight: {
      const double a = 35.0 / 32.0;
      return RadialProfile(fam, ProfileForm::PolyTruncated, 1, 2,
                           Polynomial({a, 0.0, -3.0 * a, 0.0, 3.0 * a, 0.0, -a}));
    }
    case ProfileFamily::Tricube: {
      const double a = 70.0 / 81.0;
      std::vector<double> c(10, 0.0);
      c[0] = a; c[3] = -3.0 * a; c[6] = 3.0 * a; c[9] = -a;
      return RadialProfile(fam, ProfileForm::PolyTruncated, 1, 2, Polynomial(std::move(c)));
    }
    case ProfileFamily::Triangle:
      return RadialProfile(fam, ProfileForm::PolyTruncated, 1, 2, Polynomial({1.0, -1.0}));
    case ProfileFamily::Cosine:
      return RadialProfile(fam, ProfileForm::AnalyticCosine, 1, 2, Polynomial());
    case ProfileFamily::Logistic:
      return RadialProfile(fam, ProfileForm::AnalyticLogistic, 1, 2, Polynomial());
    case ProfileFamily::Sech:
      return RadialProfile(fam, ProfileForm::AnalyticSech, 1, 2, Polynomial());
    default:
      throw DomainError("make_catalog_profile: not a catalog family");
  }
}

RadialProfile triweight_profile() { return make_catalog_profile(ProfileFamily::Triweight); }
RadialProfile tricube_profile() { return make_catalog_profile(ProfileFamily::Tricube); }
RadialProfile cosine_profile() { return make_catalog_profile(ProfileFamily::Cosine); }
RadialProfile triangle_profile() { return make_catalog_profile(ProfileFamily::Triangle); }
RadialProfile logistic_profile() { return make_catalog_profile(ProfileFamily::Logistic); }
RadialProfile sech_profile() { return make_catalog_profile(ProfileFamily::Sech); }

RadialProfile profile_by_name(const std::string& family, int d, int q) {
  if (family == "biweight") return biweight_opt_profile(d, q);
  if (family == "epanechnikov") return epanechnikov_profile(d, q);
  if (family == "gaussian") return gaussian_profile(d, q);
  if (family == "laplace") return laplace_profile(d, q);
  static const std::map<std::string, ProfileFamily> catalog = {
      {"triweight", ProfileFamily::Triweight}, {"tricube", ProfileFamily::Tricube},
      {"cosine", ProfileFamily::Cosine},       {"triangle", ProfileFamily::Triangle},
      {"logistic", ProfileFamily::Logistic},   {"sech", ProfileFamily::Sech}};
  auto it = catalog.find(family);
  if (it == catalog.end()) throw DomainError("unknown kernel family: " + family);
  if (d != 1 || q != 2)
    throw DomainError("kernel family '" + family + "' is defined for d=1, q=2 only");
  return make_catalog_profile(it->second);
}

KernelSpec KernelSpec::radial(RadialProfile profile) {
  const int d = profile.d();
  return KernelSpec(Structure::RadialBasis, std::move(profile), d);
}

KernelSpec KernelSpec::product(RadialProfile factor, int d) {
  if (factor.d() != 1)
    throw ShapeError("KernelSpec::product: factor must be a univariate profile");
  if (d < 1) throw DomainError("KernelSpec::product: dimension must be >= 1");
  return KernelSpec(Structure::Product, std::move(factor), d);
}

KernelSpec KernelSpec::by_name(const std::string& name, int d, int q) {
  if (name.rfind("pk:", 0) == 0)
    return product(profile_by_name(name.substr(3), 1, q), d);
  return radial(profile_by_name(name, d, q));
}

std::string KernelSpec::name() const {
  return structure_ == Structure::Product ? "pk:" + profile_.name() : profile_.name();
}

double KernelSpec::value(const Eigen::VectorXd& x) const {
  if (x.size() != d_) throw ShapeError("kernel value: argument dimension mismatch");
  if (structure_ == Structure::RadialBasis) return profile_(x.norm());
  double acc = 1.0;
  for (int j = 0; j < d_; ++j) acc *= profile_(std::fabs(x(j)));
  return acc;
}

Eigen::VectorXd KernelSpec::grad(const Eigen::VectorXd& x) const {
  if (x.size() != d_) throw ShapeError("kernel grad: argument dimension mismatch");
  if (structure_ == Structure::RadialBasis) {
    const double r = x.norm();
    if (r < kTinyRadius) return Eigen::VectorXd::Zero(d_);
    return (profile_.deriv(r) / r) * x;
  }
  Eigen::VectorXd v(d_), dv(d_);
  for (int j = 0; j < d_; ++j) {
    const double a = std::fabs(x(j));
    v(j) = profile_(a);
    const double s = (x(j) > 0.0) - (x(j) < 0.0);
    dv(j) = profile_.deriv(a) * s;
  }
  Eigen::VectorXd g(d_);
  for (int j = 0; j < d_; ++j) {
    double prod = dv(j);
    for (int k = 0; k < d_; ++k)
      if (k != j) prod *= v(k);
    g(j) = prod;
  }
  return g;
}

Eigen::MatrixXd KernelSpec::hess(const Eigen::VectorXd& x) const {
  if (x.size() != d_) throw ShapeError("kernel hess: argument dimension mismatch");
  if (structure_ == Structure::RadialBasis) {
    const double r = x.norm();
    if (r < kTinyRadius)
      return profile_.deriv2(0.0) * Eigen::MatrixXd::Identity(d_, d_);
    const double g1 = profile_.deriv(r), g2 = profile_.deriv2(r);
    Eigen::MatrixXd h = ((g2 - g1 / r) / (r * r)) * (x * x.transpose());
    h += (g1 / r) * Eigen::MatrixXd::Identity(d_, d_);
    return h;
  }
  Eigen::VectorXd v(d_), dv(d_), d2v(d_);
  for (int j = 0; j < d_; ++j) {
    const double a = std::fabs(x(j));
    const double s = (x(j) > 0.0) - (x(j) < 0.0);
    v(j) = profile_(a);
    dv(j) = profile_.deriv(a) * s;
    d2v(j) = profile_.deriv2(a);
  }
  Eigen::MatrixXd h(d_, d_);
  for (int i = 0; i < d_; ++i) {
    for (int j = i; j < d_; ++j) {
      double prod = (i == j) ? d2v(i) : dv(i) * dv(j);
      for (int k = 0; k < d_; ++k)
        if (k != i && k != j) prod *= v(k);
      h(i, j) = prod;
      h(j, i) = prod;
    }
  }
  return h;
}

nlohmann::json KernelSpec::to_json() const {
  nlohmann::json j;
  j["family"] = profile_.name();
  j["d"] = d_;
  j["q"] = q();
  j["structure"] = structure_ == Structure::Product ? "pk" : "rk";
  if (profile_.family() == ProfileFamily::CustomPolynomialTruncated)
    j["coefficients"] = profile_.poly().coefficients();
  return j;
}

KernelSpec KernelSpec::from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  const int d = j.at("d").get<int>();
  const int q = j.at("q").get<int>();
  const std::string structure = j.value("structure", "rk");
  if (structure != "rk" && structure != "pk")
    throw DomainError("kernel json: structure must be 'rk' or 'pk'");
  const int pd = structure == "pk" ? 1 : d;
  RadialProfile p =
      family == "custom"
          ? custom_truncated_profile(pd, q, j.at("coefficients").get<std::vector<double>>())
          : profile_by_name(family, pd, q);
  return structure == "pk" ? product(std::move(p), d) : radial(std::move(p));
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x) { return spec.value(x); }
Eigen::VectorXd kernel_grad(const KernelSpec& spec, const Eigen::VectorXd& x) {
  return spec.grad(x);
}
Eigen::MatrixXd kernel_hess(const KernelSpec& spec, const Eigen::VectorXd& x) {
  return spec.hess(x);
}

} // namespace modalkit::kernels
