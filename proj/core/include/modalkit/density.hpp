#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "modalkit/kernels.hpp"
#include "modalkit/rng.hpp"

#include "json.hpp"

namespace modalkit::density {

//! Finite mixture of diagonal-covariance Gaussians. Diagonal scales keep
//! every partial derivative a product of univariate Hermite factors.
class GaussianMixture {
public:
  GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                  std::vector<Eigen::VectorXd> scales);

  int dim() const { return dim_; }
  int components() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& means() const { return means_; }
  const std::vector<Eigen::VectorXd>& scales() const { return scales_; }

  double pdf(const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

  //! Mixed partial derivative for a multi-index (|i| capped at 14).
  double partial(const std::vector<int>& multi_index, const Eigen::VectorXd& x) const;

  //! Mixture CDF, d = 1 only.
  double cdf_1d(double x) const;

  nlohmann::json to_json() const;
  static GaussianMixture from_json(const nlohmann::json& j);

private:
  int dim_;
  std::vector<double> weights_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::VectorXd> scales_;
};

inline constexpr int kPartialOrderCap = 14;

//! Equal-weight two-component mixture (one unit isotropic component at the
//! origin, one double-variance component at the all-ones point); the stock
//! skewed test density. Available for d = 1, 2, 3, ...
GaussianMixture skew_preset(int d);

//! Asymmetric well-separated two-component 1-d mixture for clustering runs.
GaussianMixture bimodal_preset();

//! Preset lookup: "skew-gauss-1d", "skew-gauss-2d", "skew-gauss-3d",
//! "bimodal-1d".
GaussianMixture preset(const std::string& name);

//! One draw from the mixture.
Eigen::VectorXd draw(const GaussianMixture& f, Rng& rng);

//! n draws, one row per point.
Eigen::MatrixXd draw_matrix(const GaussianMixture& f, int n, Rng& rng);

//! Global maximizer; multi-start Newton ascent polished to |grad| <= 1e-12.
Eigen::VectorXd find_mode(const GaussianMixture& f);

//! All local maximizers of a 1-d mixture, sorted by location.
std::vector<std::pair<double, double>> find_modes_1d(const GaussianMixture& f);

//! Interior local minimizer between the two largest modes (d = 1).
double find_antimode_1d(const GaussianMixture& f);

struct AsymptoticQuantities {
  Eigen::VectorXd mode;
  Eigen::MatrixXd A;   // inverse Hessian of f at the expansion point
  Eigen::VectorXd b;   // leading bias vector
  Eigen::MatrixXd V;   // leading variance matrix
  double h_opt = 0.0;
  double amse_opt = 0.0;
};

//! Bias/variance expansion of the mode estimator for this density and
//! kernel, the error-minimizing bandwidth and the resulting error value.
AsymptoticQuantities asymptotics(const GaussianMixture& f, const kernels::KernelSpec& spec,
                                 long n);

//! Same expansion anchored at a given stationary point (used for the
//! antimode when tuning clustering bandwidths).
AsymptoticQuantities asymptotics_at(const GaussianMixture& f, const kernels::KernelSpec& spec,
                                    long n, const Eigen::VectorXd& point);

} // namespace modalkit::density
