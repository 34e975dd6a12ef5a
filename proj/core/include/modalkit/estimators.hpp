#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "modalkit/density.hpp"
#include "modalkit/kernels.hpp"

namespace modalkit::estimators {

struct Sample {
  Eigen::MatrixXd points;  // n x d, one point per row

  Sample() = default;
  explicit Sample(Eigen::MatrixXd pts);
  int n() const { return static_cast<int>(points.rows()); }
  int d() const { return static_cast<int>(points.cols()); }

  //! Headerless CSV, one point per row.
  static Sample from_csv(const std::string& path);
};

struct EstimateReport {
  Eigen::VectorXd estimate;
  double objective = 0.0;
  int iterations = 0;
  int starts_tried = 0;
  bool converged = false;
};

//! Density estimate evaluator over a fixed sample. Builds a sorted index
//! (d = 1) or a uniform grid (d <= 3) so truncated kernels skip points
//! outside radius h * support.
class KdeEvaluator {
public:
  KdeEvaluator(const Sample& sample, const kernels::KernelSpec& spec, double h);

  int d() const { return d_; }
  double h() const { return h_; }
  const kernels::KernelSpec& spec() const { return spec_; }

  double value(const Eigen::VectorXd& x) const;
  void value_grad(const Eigen::VectorXd& x, double& f, Eigen::VectorXd& g) const;
  void value_grad_hess(const Eigen::VectorXd& x, double& f, Eigen::VectorXd& g,
                       Eigen::MatrixXd& hess) const;

  //! Bounding box of the sample.
  Eigen::VectorXd lo() const { return lo_; }
  Eigen::VectorXd hi() const { return hi_; }

private:
  template <class Fn>
  void for_each_in_window(const Eigen::VectorXd& x, Fn&& fn) const;

  const Eigen::MatrixXd pts_;
  kernels::KernelSpec spec_;
  double h_;
  int d_;
  int n_;
  double window_;  // query radius in data units; +inf -> full scan
  // d == 1: values sorted ascending
  std::vector<double> sorted1_;
  // 2 <= d <= 3: uniform grid buckets
  bool grid_ = false;
  Eigen::VectorXd lo_, hi_;
  Eigen::Vector3i dims_;
  double cell_ = 0.0;
  std::vector<std::vector<int>> buckets_;
};

double kde(const Sample& sample, const kernels::KernelSpec& spec, double h,
           const Eigen::VectorXd& x);
Eigen::VectorXd kde_grad(const Sample& sample, const kernels::KernelSpec& spec, double h,
                         const Eigen::VectorXd& x);
Eigen::MatrixXd kde_hess(const Sample& sample, const kernels::KernelSpec& spec, double h,
                         const Eigen::VectorXd& x);

//! Mode estimate: multi-start gradient ascent with backtracking and Newton
//! polish over the density estimate. Default starts are the 20 sample
//! points with the largest estimate values.
EstimateReport kme(const Sample& sample, const kernels::KernelSpec& spec, double h,
                   const std::vector<Eigen::VectorXd>* starts = nullptr);

//! In-sample mode estimate: the sample point with the largest estimate,
//! found by exact evaluation at every point; ties break to the lowest index.
EstimateReport isme(const Sample& sample, const kernels::KernelSpec& spec, double h);

//! Kernel objective for modal linear regression at a candidate coefficient
//! matrix Omega (dY x dX).
double mlr_objective(const Eigen::MatrixXd& x_sample, const Eigen::MatrixXd& y_sample,
                     const kernels::KernelSpec& spec, double h, const Eigen::MatrixXd& omega);

//! Fit the scalar-response modal regression coefficients by multi-start
//! ascent; starts are the least-squares solution and perturbations of it.
EstimateReport mlr_fit(const Eigen::MatrixXd& x_sample, const Eigen::VectorXd& y_sample,
                       const kernels::KernelSpec& spec, double h);

//! Bias/variance oracle for the scalar-response fit under a location-family
//! noise model; expectations over the regressor law taken by Monte Carlo.
std::pair<double, double> mlr_amse_oracle(const density::GaussianMixture& x_dist,
                                          const density::GaussianMixture& noise,
                                          const Eigen::RowVectorXd& theta,
                                          const kernels::KernelSpec& spec, long n,
                                          long mc_draws = 100000, std::uint64_t seed = 1);

struct ClusterResult {
  double zeta_n = 0.0;  // estimated split point (KDE antimode)
  double cer = 0.0;     // clustering error rate against the true density
  double mode_lo = 0.0;
  double mode_hi = 0.0;
};

//! Two-cluster split of a univariate sample at the KDE antimode, scored
//! against the generating density's own split point.
ClusterResult cluster_1d(const Sample& sample, const kernels::KernelSpec& spec, double h,
                         const density::GaussianMixture& truth);

} // namespace modalkit::estimators
