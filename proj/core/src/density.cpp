#include "modalkit/density.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "modalkit/moments.hpp"
#include "modalkit/specialfn.hpp"

namespace modalkit::density {

namespace sf = modalkit::specialfn;

namespace {

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

//! Enumerate multi-indices of total order `total` over `d` coordinates.
void enumerate_multi(int d, int total, std::vector<int>& cur,
                     const std::function<void(const std::vector<int>&)>& fn, int pos = 0) {
  if (pos == d - 1) {
    cur[pos] = total;
    fn(cur);
    return;
  }
  for (int k = 0; k <= total; ++k) {
    cur[pos] = k;
    enumerate_multi(d, total - k, cur, fn, pos + 1);
  }
}

double multi_factorial(const std::vector<int>& m) {
  double acc = 1.0;
  for (int v : m) acc *= std::exp(sf::log_gamma(v + 1.0));
  return acc;
}

struct StationaryPoint {
  Eigen::VectorXd x;
  double f;
};

//! Newton search for a stationary point from one start; damped toward
//! gradient steps when the Newton direction fails to increase f.
bool newton_stationary(const GaussianMixture& f, Eigen::VectorXd x, StationaryPoint& out) {
  const int kMaxIter = 200;
  for (int it = 0; it < kMaxIter; ++it) {
    const Eigen::VectorXd g = f.grad(x);
    if (g.norm() <= 1e-12) {
      out = {x, f.pdf(x)};
      return true;
    }
    const Eigen::MatrixXd h = f.hessian(x);
    Eigen::VectorXd step;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
    if (lu.isInvertible()) {
      step = -lu.solve(g);
    } else {
      step = g;
    }
    // keep steps bounded; the ascent target is a nearby stationary point
    const double cap = 1.0 + x.norm();
    if (step.norm() > cap) step *= cap / step.norm();
    double t = 1.0;
    const double f0 = f.pdf(x);
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd cand = x + t * step;
      // accept any move that shrinks the gradient or raises f
      if (f.grad(cand).norm() < g.norm() || f.pdf(cand) > f0) {
        x = cand;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) return false;
  }
  return false;
}

bool is_negative_definite(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  return es.eigenvalues().maxCoeff() < 0.0;
}

} // namespace

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                                 std::vector<Eigen::VectorXd> scales)
  : weights_(std::move(weights)), means_(std::move(means)), scales_(std::move(scales)) {
  if (weights_.empty() || weights_.size() != means_.size() || weights_.size() != scales_.size())
    throw ShapeError("GaussianMixture: weights/means/scales size mismatch");
  dim_ = static_cast<int>(means_[0].size());
  double wsum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) throw DomainError("GaussianMixture: weights must be positive");
    wsum += w;
  }
  if (std::fabs(wsum - 1.0) > 1e-12)
    throw DomainError("GaussianMixture: weights must sum to 1 (got " + std::to_string(wsum) + ")");
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (means_[k].size() != dim_ || scales_[k].size() != dim_)
      throw ShapeError("GaussianMixture: component dimension mismatch");
    for (int j = 0; j < dim_; ++j)
      if (!(scales_[k](j) > 0.0)) throw DomainError("GaussianMixture: scales must be positive");
  }
}

double GaussianMixture::pdf(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw ShapeError("GaussianMixture::pdf: dimension mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    double comp = weights_[k];
    for (int j = 0; j < dim_; ++j) {
      const double s = scales_[k](j);
      comp *= norm_pdf((x(j) - means_[k](j)) / s) / s;
    }
    acc += comp;
  }
  return acc;
}

double GaussianMixture::partial(const std::vector<int>& multi_index,
                                const Eigen::VectorXd& x) const {
  if (static_cast<int>(multi_index.size()) != dim_)
    throw ShapeError("GaussianMixture::partial: multi-index length mismatch");
  if (x.size() != dim_) throw ShapeError("GaussianMixture::partial: dimension mismatch");
  int total = 0;
  for (int ij : multi_index) {
    if (ij < 0) throw DomainError("GaussianMixture::partial: negative index");
    total += ij;
  }
  if (total > kPartialOrderCap)
    throw DomainError("GaussianMixture::partial: order above cap " +
                      std::to_string(kPartialOrderCap));
  double acc = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    double comp = weights_[k];
    for (int j = 0; j < dim_; ++j) {
      const double s = scales_[k](j);
      const double z = (x(j) - means_[k](j)) / s;
      const int ij = multi_index[j];
      double factor = norm_pdf(z) / s;
      if (ij > 0)
        factor *= std::pow(-1.0 / s, ij) * sf::hermite_prob(static_cast<unsigned>(ij), z);
      comp *= factor;
    }
    acc += comp;
  }
  return acc;
}

Eigen::VectorXd GaussianMixture::grad(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(dim_);
  std::vector<int> idx(dim_, 0);
  for (int j = 0; j < dim_; ++j) {
    idx[j] = 1;
    g(j) = partial(idx, x);
    idx[j] = 0;
  }
  return g;
}

Eigen::MatrixXd GaussianMixture::hessian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd h(dim_, dim_);
  std::vector<int> idx(dim_, 0);
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      idx[i] += 1;
      idx[j] += 1;
      h(i, j) = partial(idx, x);
      h(j, i) = h(i, j);
      idx[i] = 0;
      idx[j] = 0;
    }
  }
  return h;
}

double GaussianMixture::cdf_1d(double x) const {
  if (dim_ != 1) throw ShapeError("GaussianMixture::cdf_1d: density is not univariate");
  double acc = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k)
    acc += weights_[k] * norm_cdf((x - means_[k](0)) / scales_[k](0));
  return acc;
}

nlohmann::json GaussianMixture::to_json() const {
  nlohmann::json j;
  j["weights"] = weights_;
  for (const auto& m : means_)
    j["means"].push_back(std::vector<double>(m.data(), m.data() + m.size()));
  for (const auto& s : scales_)
    j["scales"].push_back(std::vector<double>(s.data(), s.data() + s.size()));
  return j;
}

GaussianMixture GaussianMixture::from_json(const nlohmann::json& j) {
  auto weights = j.at("weights").get<std::vector<double>>();
  std::vector<Eigen::VectorXd> means, scales;
  for (const auto& m : j.at("means")) {
    auto v = m.get<std::vector<double>>();
    means.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), v.size()));
  }
  for (const auto& s : j.at("scales")) {
    auto v = s.get<std::vector<double>>();
    scales.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), v.size()));
  }
  return GaussianMixture(std::move(weights), std::move(means), std::move(scales));
}

GaussianMixture skew_preset(int d) {
  if (d < 1) throw DomainError("skew_preset: dimension must be >= 1");
  std::vector<double> w = {0.5, 0.5};
  std::vector<Eigen::VectorXd> mu = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};
  std::vector<Eigen::VectorXd> sc = {Eigen::VectorXd::Ones(d),
                                     Eigen::VectorXd::Constant(d, std::sqrt(2.0))};
  return GaussianMixture(std::move(w), std::move(mu), std::move(sc));
}

GaussianMixture bimodal_preset() {
  std::vector<double> w = {0.6, 0.4};
  std::vector<Eigen::VectorXd> mu = {Eigen::VectorXd::Zero(1),
                                     Eigen::VectorXd::Constant(1, 4.0)};
  std::vector<Eigen::VectorXd> sc = {Eigen::VectorXd::Ones(1),
                                     Eigen::VectorXd::Constant(1, 1.3)};
  return GaussianMixture(std::move(w), std::move(mu), std::move(sc));
}

GaussianMixture preset(const std::string& name) {
  if (name == "skew-gauss-1d") return skew_preset(1);
  if (name == "skew-gauss-2d") return skew_preset(2);
  if (name == "skew-gauss-3d") return skew_preset(3);
  if (name == "bimodal-1d") return bimodal_preset();
  throw DomainError("unknown density preset '" + name +
                    "' (known: skew-gauss-1d, skew-gauss-2d, skew-gauss-3d, bimodal-1d)");
}

Eigen::VectorXd draw(const GaussianMixture& f, Rng& rng) {
  const int d = f.dim();
  std::vector<double> cum(f.components());
  double acc = 0.0;
  for (int k = 0; k < f.components(); ++k) {
    acc += f.weights()[k];
    cum[k] = acc;
  }
  const int k = rng.categorical(cum);
  Eigen::VectorXd x(d);
  for (int j = 0; j < d; ++j) x(j) = f.means()[k](j) + f.scales()[k](j) * rng.normal();
  return x;
}

Eigen::MatrixXd draw_matrix(const GaussianMixture& f, int n, Rng& rng) {
  Eigen::MatrixXd pts(n, f.dim());
  for (int i = 0; i < n; ++i) pts.row(i) = draw(f, rng).transpose();
  return pts;
}

Eigen::VectorXd find_mode(const GaussianMixture& f) {
  const int d = f.dim();
  std::vector<Eigen::VectorXd> starts = f.means();
  Eigen::VectorXd wmean = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < f.components(); ++k) wmean += f.weights()[k] * f.means()[k];
  starts.push_back(wmean);

  std::vector<StationaryPoint> maxima;
  std::vector<std::string> failed;
  for (const auto& s : starts) {
    StationaryPoint pt;
    if (!newton_stationary(f, s, pt)) continue;
    if (!is_negative_definite(f.hessian(pt.x))) continue;
    bool dup = false;
    for (const auto& m : maxima)
      if ((m.x - pt.x).norm() <= 1e-8 * (1.0 + pt.x.norm())) dup = true;
    if (!dup) maxima.push_back(pt);
  }
  if (maxima.empty())
    throw SearchFailureError("find_mode: no interior maximum found from " +
                             std::to_string(starts.size()) + " starts");
  std::sort(maxima.begin(), maxima.end(),
            [](const StationaryPoint& a, const StationaryPoint& b) { return a.f > b.f; });
  if (maxima.size() > 1 && maxima[0].f - maxima[1].f <= 1e-14)
    throw TopologyError("find_mode: global maximizer is not unique (tied maxima)");
  return maxima[0].x;
}

std::vector<std::pair<double, double>> find_modes_1d(const GaussianMixture& f) {
  if (f.dim() != 1) throw ShapeError("find_modes_1d: density is not univariate");
  double lo = f.means()[0](0), hi = lo, smax = 0.0;
  for (int k = 0; k < f.components(); ++k) {
    lo = std::min(lo, f.means()[k](0));
    hi = std::max(hi, f.means()[k](0));
    smax = std::max(smax, f.scales()[k](0));
  }
  lo -= 8.0 * smax;
  hi += 8.0 * smax;
  const int kGrid = 4096;
  std::vector<double> val(kGrid);
  Eigen::VectorXd x(1);
  for (int i = 0; i < kGrid; ++i) {
    x(0) = lo + (hi - lo) * i / (kGrid - 1);
    val[i] = f.pdf(x);
  }
  std::vector<std::pair<double, double>> modes;
  for (int i = 1; i + 1 < kGrid; ++i) {
    if (val[i] >= val[i - 1] && val[i] > val[i + 1]) {
      x(0) = lo + (hi - lo) * i / (kGrid - 1);
      StationaryPoint pt;
      if (!newton_stationary(f, x, pt)) continue;
      if (f.hessian(pt.x)(0, 0) >= 0.0) continue;
      bool dup = false;
      for (auto& m : modes)
        if (std::fabs(m.first - pt.x(0)) <= 1e-7 * (1.0 + std::fabs(pt.x(0)))) dup = true;
      if (!dup) modes.emplace_back(pt.x(0), pt.f);
    }
  }
  std::sort(modes.begin(), modes.end());
  return modes;
}

double find_antimode_1d(const GaussianMixture& f) {
  auto modes = find_modes_1d(f);
  if (modes.size() < 2)
    throw TopologyError("find_antimode_1d: density has fewer than two modes");
  std::sort(modes.begin(), modes.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  double a = modes[0].first, b = modes[1].first;
  if (a > b) std::swap(a, b);
  // golden-section minimize f on [a, b], then polish on f'
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  Eigen::VectorXd p(1);
  auto fv = [&](double t) {
    p(0) = t;
    return f.pdf(p);
  };
  double f1 = fv(x1), f2 = fv(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::fabs(a)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = fv(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = fv(x2);
    }
  }
  double z = 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    p(0) = z;
    const double g = f.grad(p)(0);
    const double h = f.hessian(p)(0, 0);
    if (std::fabs(g) <= 1e-13 || h <= 0.0) break;
    z -= g / h;
  }
  p(0) = z;
  if (f.hessian(p)(0, 0) <= 0.0)
    throw TopologyError("find_antimode_1d: polished point is not a proper minimum");
  return z;
}

AsymptoticQuantities asymptotics_at(const GaussianMixture& f, const kernels::KernelSpec& spec,
                                    long n, const Eigen::VectorXd& point) {
  if (n < 1) throw DomainError("asymptotics: sample size must be positive");
  const int d = f.dim();
  if (spec.d() != d) throw ShapeError("asymptotics: kernel dimension mismatch");
  const int q = spec.q();
  const double ftheta = f.pdf(point);
  const Eigen::MatrixXd H = f.hessian(point);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
  if (!lu.isInvertible()) throw NumericError("asymptotics: singular Hessian at expansion point");
  const Eigen::MatrixXd A = lu.inverse();

  // bias vector: radial kernels collapse the multi-index sum onto iterated
  // Laplacians; product kernels keep only the pure q-th coordinate partials
  Eigen::VectorXd b(d);
  if (spec.structure() == kernels::Structure::RadialBasis) {
    const double pref = std::exp(0.5 * d * std::log(M_PI) - (q - 1) * std::log(2.0) -
                                 sf::log_gamma(0.5 * (d + q)) - sf::log_gamma(0.5 * q + 1.0));
    const int p = q / 2;
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      std::vector<int> m(d, 0);
      enumerate_multi(d, p, m, [&](const std::vector<int>& mi) {
        std::vector<int> full(d);
        for (int t = 0; t < d; ++t) full[t] = 2 * mi[t];
        full[j] += 1;
        const double coef =
            std::exp(sf::log_gamma(p + 1.0)) / multi_factorial(mi);
        acc += coef * f.partial(full, point);
      });
      b(j) = pref * acc;
    }
    b *= moments::moment_B(spec.profile(), q);
  } else {
    const double two_over_qfact = 2.0 / std::exp(sf::log_gamma(q + 1.0));
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) {
        std::vector<int> full(d, 0);
        full[k] = q;
        full[j] += 1;
        acc += f.partial(full, point);
      }
      b(j) = two_over_qfact * acc;
    }
    b *= moments::moment_B(spec.profile(), q);
  }

  Eigen::MatrixXd V;
  if (spec.structure() == kernels::Structure::RadialBasis) {
    V = ftheta * moments::v_d(d) * moments::moment_V(spec.profile(), 1) *
        Eigen::MatrixXd::Identity(d, d);
  } else {
    const double v11 = moments::moment_V(spec.profile(), 1);
    const double v10 = moments::moment_V(spec.profile(), 0);
    V = ftheta * std::pow(2.0, d) * v11 * std::pow(v10, d - 1) *
        Eigen::MatrixXd::Identity(d, d);
  }

  const Eigen::VectorXd Ab = A * b;
  const double ab2 = Ab.squaredNorm();
  const double bscale = A.norm() * b.norm();
  if (std::sqrt(ab2) <= 1e-8 * std::max(1e-12, bscale) || b.norm() == 0.0)
    throw DegenerateBiasError(
        "asymptotics: leading bias vanishes at the expansion point; the "
        "error-optimal bandwidth is undefined for this density/kernel pair");
  const double travA = (A * V * A).trace();
  const double expo = 1.0 / (d + 2.0 * q + 2.0);
  const double h = std::pow((d + 2.0) * travA / (2.0 * q * static_cast<double>(n) * ab2), expo);
  const double amse = 2.0 * q / (d + 2.0 * q + 2.0) *
                      std::pow(ab2, (d + 2.0) * expo) *
                      std::pow((d + 2.0) / (2.0 * q * static_cast<double>(n)) * travA,
                               2.0 * q * expo);
  AsymptoticQuantities out;
  out.mode = point;
  out.A = A;
  out.b = b;
  out.V = V;
  out.h_opt = h;
  out.amse_opt = amse;
  return out;
}

AsymptoticQuantities asymptotics(const GaussianMixture& f, const kernels::KernelSpec& spec,
                                 long n) {
  return asymptotics_at(f, spec, n, find_mode(f));
}

} // namespace modalkit::density
