#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "modalkit/errors.hpp"
#include "modalkit/polynomial.hpp"

#include "json.hpp"

namespace modalkit::kernels {

using specialfn::Polynomial;

enum class ProfileFamily {
  BiweightOpt,
  Epanechnikov,
  Gaussian,
  Laplace,
  CustomPolynomialTruncated,
  Triweight,
  Tricube,
  Cosine,
  Triangle,
  Logistic,
  Sech,
};

//! How a profile is evaluated: a polynomial against a weight, or a fixed
//! analytic form for the non-polynomial catalog kernels.
enum class ProfileForm {
  PolyTruncated,   // poly(x) on [0,1], exactly 0 outside
  PolyGauss,       // poly(x) * exp(-x^2/2)
  PolyExp,         // poly(x) * exp(-x)
  AnalyticCosine,
  AnalyticLogistic,
  AnalyticSech,
};

inline constexpr int kMaxOrder = 12;

//! Univariate profile G on [0, inf). A radial-basis kernel is G(||x||),
//! a product kernel multiplies the symmetric factor G(|x_j|) over coordinates.
class RadialProfile {
public:
  ProfileFamily family() const { return family_; }
  ProfileForm form() const { return form_; }
  int d() const { return d_; }
  int q() const { return q_; }
  bool truncated() const {
    return form_ == ProfileForm::PolyTruncated || form_ == ProfileForm::AnalyticCosine;
  }
  //! Truncation radius; +inf when unbounded.
  double support() const;
  //! Radius beyond which the profile is numerically negligible.
  double effective_radius() const;
  const Polynomial& poly() const { return poly_; }
  std::string name() const;

  double operator()(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;

private:
  friend RadialProfile biweight_opt_profile(int, int);
  friend RadialProfile epanechnikov_profile(int, int);
  friend RadialProfile gaussian_profile(int, int);
  friend RadialProfile laplace_profile(int, int);
  friend RadialProfile custom_truncated_profile(int, int, std::vector<double>);
  friend RadialProfile make_catalog_profile(ProfileFamily);

  RadialProfile(ProfileFamily fam, ProfileForm form, int d, int q, Polynomial poly)
    : family_(fam), form_(form), d_(d), q_(q), poly_(std::move(poly)) {}

  ProfileFamily family_;
  ProfileForm form_;
  int d_;
  int q_;
  Polynomial poly_;
};

//! Hierarchy constructions. d >= 1, q even in [2, 12].
RadialProfile biweight_opt_profile(int d, int q);
RadialProfile epanechnikov_profile(int d, int q);
RadialProfile gaussian_profile(int d, int q);
RadialProfile laplace_profile(int d, int q);

//! User polynomial on [0,1]; the moment conditions for a d-variate q-th
//! order kernel are validated at construction (tolerance 1e-6).
RadialProfile custom_truncated_profile(int d, int q, std::vector<double> coefficients);

//! Fixed univariate 2nd-order catalog kernels.
RadialProfile triweight_profile();
RadialProfile tricube_profile();
RadialProfile cosine_profile();
RadialProfile triangle_profile();
RadialProfile logistic_profile();
RadialProfile sech_profile();

//! Lookup by family name ("biweight", "gaussian", "tricube", ...).
RadialProfile profile_by_name(const std::string& family, int d, int q);

enum class Structure { RadialBasis, Product };

//! Multivariate kernel: either G(||x||) or prod_j G(|x_j|).
class KernelSpec {
public:
  static KernelSpec radial(RadialProfile profile);
  static KernelSpec product(RadialProfile factor, int d);
  //! Parse "biweight" (radial) or "pk:biweight" (product).
  static KernelSpec by_name(const std::string& name, int d, int q);

  Structure structure() const { return structure_; }
  const RadialProfile& profile() const { return profile_; }
  int d() const { return d_; }
  int q() const { return profile_.q(); }
  std::string name() const;

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hess(const Eigen::VectorXd& x) const;

  //! Truncation radius (radial: euclidean; product: per coordinate).
  double support() const { return profile_.support(); }
  double effective_radius() const { return profile_.effective_radius(); }

  nlohmann::json to_json() const;
  static KernelSpec from_json(const nlohmann::json& j);

private:
  KernelSpec(Structure s, RadialProfile p, int d)
    : structure_(s), profile_(std::move(p)), d_(d) {}
  Structure structure_;
  RadialProfile profile_;
  int d_;
};

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x);
Eigen::VectorXd kernel_grad(const KernelSpec& spec, const Eigen::VectorXd& x);
Eigen::MatrixXd kernel_hess(const KernelSpec& spec, const Eigen::VectorXd& x);

} // namespace modalkit::kernels
