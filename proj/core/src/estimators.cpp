#include "modalkit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "modalkit/moments.hpp"
#include "modalkit/rng.hpp"
#include "modalkit/specialfn.hpp"

namespace modalkit::estimators {

using kernels::KernelSpec;
using kernels::Structure;

namespace {

constexpr double kGradTolRelKme = 1e-10;
constexpr double kGradTolRelMlr = 1e-8;

struct AscentProblem {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<void(const Eigen::VectorXd&, double&, Eigen::VectorXd&)> value_grad;
  std::function<bool(const Eigen::VectorXd&, Eigen::MatrixXd&)> hess;  // may be empty
  double char_length = 1.0;
  double grad_scale = 1.0;
  double grad_tol_rel = 1e-10;
  int max_iter = 300;
};

struct AscentOutcome {
  Eigen::VectorXd x;
  double f = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

//! Backtracking gradient ascent with a Newton step where the Hessian is
//! negative definite. Kernels with cusps (the exponential family) can put
//! the maximum at a nonsmooth point; a stalled line search then falls back
//! to a coordinate probe certificate at resolution 1e-7 * char_length.
AscentOutcome ascend(const AscentProblem& prob, Eigen::VectorXd x) {
  const int d = static_cast<int>(x.size());
  AscentOutcome out;
  double f;
  Eigen::VectorXd g(d);
  prob.value_grad(x, f, g);
  Eigen::MatrixXd H(d, d);
  for (int iter = 0; iter < prob.max_iter; ++iter) {
    out.iterations = iter;
    const double tol = prob.grad_tol_rel * std::max(std::fabs(f) * prob.grad_scale, 1e-300);
    if (g.norm() <= tol) {
      out.x = x;
      out.f = f;
      out.converged = true;
      return out;
    }
    // candidate directions: Newton first when usable, then the gradient
    bool accepted = false;
    for (int pass = 0; pass < 2 && !accepted; ++pass) {
      Eigen::VectorXd p;
      double alpha;
      if (pass == 0) {
        if (!prob.hess || !prob.hess(x, H)) continue;
        Eigen::LLT<Eigen::MatrixXd> llt(-H);
        if (llt.info() != Eigen::Success) continue;
        p = llt.solve(g);
        if (g.dot(p) <= 0.0) continue;
        alpha = 1.0;
      } else {
        p = g;
        alpha = 0.5 * prob.char_length / std::max(g.norm(), 1e-300);
      }
      const double slope = g.dot(p);
      for (int ls = 0; ls < 55; ++ls) {
        const Eigen::VectorXd cand = x + alpha * p;
        const double fc = prob.value(cand);
        if (fc >= f + 1e-4 * alpha * slope) {
          x = cand;
          prob.value_grad(x, f, g);
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
    }
    if (!accepted) {
      // stalled: certify a local maximum by coordinate probes
      const double delta = 1e-7 * prob.char_length;
      bool improved = false;
      Eigen::VectorXd cand = x;
      for (int j = 0; j < d && !improved; ++j) {
        for (int s = -1; s <= 1 && !improved; s += 2) {
          cand = x;
          cand(j) += s * delta;
          const double fc = prob.value(cand);
          if (fc > f * (1.0 + 1e-15) + 1e-300) {
            x = cand;
            prob.value_grad(x, f, g);
            improved = true;
          }
        }
      }
      if (!improved) {
        out.x = x;
        out.f = f;
        out.converged = true;
        return out;
      }
    }
  }
  out.x = x;
  out.f = f;
  out.converged = false;
  return out;
}

} // namespace

Sample::Sample(Eigen::MatrixXd pts) : points(std::move(pts)) {
  if (points.rows() < 1) throw DomainError("Sample: need at least one point");
  if (points.cols() < 1) throw DomainError("Sample: need at least one coordinate");
  if (!points.allFinite()) throw DomainError("Sample: non-finite entries");
}

Sample Sample::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("Sample::from_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        row.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw DomainError("Sample::from_csv: bad number '" + tok + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DomainError("Sample::from_csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DomainError("Sample::from_csv: no data in " + path);
  Eigen::MatrixXd pts(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j) pts(i, j) = rows[i][j];
  return Sample(std::move(pts));
}

KdeEvaluator::KdeEvaluator(const Sample& sample, const KernelSpec& spec, double h)
  : pts_(sample.points), spec_(spec), h_(h), d_(sample.d()), n_(sample.n()) {
  if (!(h > 0.0)) throw DomainError("KdeEvaluator: bandwidth must be positive");
  if (spec.d() != d_) throw ShapeError("KdeEvaluator: kernel dimension mismatch");
  window_ = h_ * spec_.effective_radius();
  lo_ = pts_.colwise().minCoeff();
  hi_ = pts_.colwise().maxCoeff();
  if (d_ == 1) {
    sorted1_.resize(n_);
    for (int i = 0; i < n_; ++i) sorted1_[i] = pts_(i, 0);
    std::sort(sorted1_.begin(), sorted1_.end());
    return;
  }
  if (d_ <= 3 && std::isfinite(window_)) {
    const double extent = (hi_ - lo_).maxCoeff();
    if (window_ < 0.5 * extent) {
      cell_ = window_;
      long total = 1;
      dims_.setOnes();
      for (int j = 0; j < d_; ++j) {
        dims_(j) = static_cast<int>((hi_(j) - lo_(j)) / cell_) + 1;
        total *= dims_(j);
      }
      if (total <= (1L << 22)) {
        grid_ = true;
        buckets_.assign(total, {});
        for (int i = 0; i < n_; ++i) {
          long idx = 0;
          for (int j = 0; j < d_; ++j) {
            int c = static_cast<int>((pts_(i, j) - lo_(j)) / cell_);
            c = std::min(std::max(c, 0), dims_(j) - 1);
            idx = idx * dims_(j) + c;
          }
          buckets_[idx].push_back(i);
        }
      }
    }
  }
}

template <class Fn>
void KdeEvaluator::for_each_in_window(const Eigen::VectorXd& x, Fn&& fn) const {
  if (!grid_) {
    for (int i = 0; i < n_; ++i) fn(i);
    return;
  }
  int clo[3], chi[3];
  for (int j = 0; j < d_; ++j) {
    clo[j] = std::max(0, static_cast<int>((x(j) - window_ - lo_(j)) / cell_));
    chi[j] = std::min(dims_(j) - 1, static_cast<int>((x(j) + window_ - lo_(j)) / cell_));
    if (clo[j] > chi[j]) return;
  }
  int c[3] = {clo[0], d_ > 1 ? clo[1] : 0, d_ > 2 ? clo[2] : 0};
  while (true) {
    long idx = 0;
    for (int j = 0; j < d_; ++j) idx = idx * dims_(j) + c[j];
    for (int i : buckets_[idx]) fn(i);
    int j = d_ - 1;
    while (j >= 0) {
      if (++c[j] <= chi[j]) break;
      c[j] = clo[j];
      --j;
    }
    if (j < 0) break;
  }
}

double KdeEvaluator::value(const Eigen::VectorXd& x) const {
  if (x.size() != d_) throw ShapeError("KdeEvaluator::value: dimension mismatch");
  const auto& g = spec_.profile();
  const double inv_h = 1.0 / h_;
  double acc = 0.0;
  if (d_ == 1) {
    const double xv = x(0);
    auto lo = sorted1_.begin(), hi = sorted1_.end();
    if (std::isfinite(window_)) {
      lo = std::lower_bound(sorted1_.begin(), sorted1_.end(), xv - window_);
      hi = std::upper_bound(lo, sorted1_.end(), xv + window_);
    }
    for (auto it = lo; it != hi; ++it) acc += g(std::fabs(xv - *it) * inv_h);
    return acc / (n_ * h_);
  }
  if (spec_.structure() == Structure::RadialBasis) {
    for_each_in_window(x, [&](int i) {
      double r2 = 0.0;
      for (int j = 0; j < d_; ++j) {
        const double dj = x(j) - pts_(i, j);
        r2 += dj * dj;
      }
      acc += g(std::sqrt(r2) * inv_h);
    });
  } else {
    for_each_in_window(x, [&](int i) {
      double prod = 1.0;
      for (int j = 0; j < d_ && prod != 0.0; ++j)
        prod *= g(std::fabs(x(j) - pts_(i, j)) * inv_h);
      acc += prod;
    });
  }
  return acc / (n_ * std::pow(h_, d_));
}

void KdeEvaluator::value_grad(const Eigen::VectorXd& x, double& f, Eigen::VectorXd& grad) const {
  Eigen::MatrixXd unused;
  value_grad_hess(x, f, grad, unused);
}

void KdeEvaluator::value_grad_hess(const Eigen::VectorXd& x, double& f, Eigen::VectorXd& grad,
                                   Eigen::MatrixXd& hess) const {
  if (x.size() != d_) throw ShapeError("KdeEvaluator: dimension mismatch");
  const bool want_hess = hess.rows() == d_ && hess.cols() == d_;
  const auto& g = spec_.profile();
  const double inv_h = 1.0 / h_;
  double acc = 0.0;
  grad.setZero(d_);
  if (want_hess) hess.setZero();
  if (d_ == 1) {
    const double xv = x(0);
    auto lo = sorted1_.begin(), hi = sorted1_.end();
    if (std::isfinite(window_)) {
      lo = std::lower_bound(sorted1_.begin(), sorted1_.end(), xv - window_);
      hi = std::upper_bound(lo, sorted1_.end(), xv + window_);
    }
    double gacc = 0.0, hacc = 0.0;
    for (auto it = lo; it != hi; ++it) {
      const double u = (xv - *it) * inv_h;
      const double a = std::fabs(u);
      acc += g(a);
      const double s = (u > 0.0) - (u < 0.0);
      gacc += g.deriv(a) * s;
      if (want_hess) hacc += g.deriv2(a);
    }
    const double pref = 1.0 / (n_ * h_);
    f = acc * pref;
    grad(0) = gacc * pref * inv_h;
    if (want_hess) hess(0, 0) = hacc * pref * inv_h * inv_h;
    return;
  }
  const double pref = 1.0 / (n_ * std::pow(h_, d_));
  if (spec_.structure() == Structure::RadialBasis) {
    for_each_in_window(x, [&](int i) {
      double r2 = 0.0;
      for (int j = 0; j < d_; ++j) {
        const double dj = x(j) - pts_(i, j);
        r2 += dj * dj;
      }
      const double r = std::sqrt(r2);
      const double ru = r * inv_h;
      acc += g(ru);
      if (r < 1e-300) {
        if (want_hess) {
          const double g2 = g.deriv2(0.0);
          for (int j = 0; j < d_; ++j) hess(j, j) += g2 * inv_h * inv_h;
        }
        return;
      }
      const double g1 = g.deriv(ru);
      const double sr = g1 / r;  // times inv_h handled at the end via (x-p)
      for (int j = 0; j < d_; ++j) grad(j) += sr * (x(j) - pts_(i, j)) * inv_h;
      if (want_hess) {
        const double g2 = g.deriv2(ru);
        const double c1 = (g2 - g1 / ru) / (r2);
        const double c2 = g1 / ru;
        for (int a = 0; a < d_; ++a) {
          for (int b = a; b < d_; ++b) {
            double v = c1 * (x(a) - pts_(i, a)) * (x(b) - pts_(i, b));
            if (a == b) v += c2;
            hess(a, b) += v * inv_h * inv_h;
          }
        }
      }
    });
  } else {
    Eigen::VectorXd vj(d_), dj(d_), d2j(d_);
    for_each_in_window(x, [&](int i) {
      for (int j = 0; j < d_; ++j) {
        const double u = (x(j) - pts_(i, j)) * inv_h;
        const double a = std::fabs(u);
        const double s = (u > 0.0) - (u < 0.0);
        vj(j) = g(a);
        dj(j) = g.deriv(a) * s;
        if (want_hess) d2j(j) = g.deriv2(a);
      }
      double prod = 1.0;
      for (int j = 0; j < d_; ++j) prod *= vj(j);
      acc += prod;
      for (int j = 0; j < d_; ++j) {
        double gj = dj(j);
        for (int k = 0; k < d_; ++k)
          if (k != j) gj *= vj(k);
        grad(j) += gj * inv_h;
      }
      if (want_hess) {
        for (int a = 0; a < d_; ++a) {
          for (int b = a; b < d_; ++b) {
            double v = (a == b) ? d2j(a) : dj(a) * dj(b);
            for (int k = 0; k < d_; ++k)
              if (k != a && k != b) v *= vj(k);
            hess(a, b) += v * inv_h * inv_h;
          }
        }
      }
    });
  }
  f = acc * pref;
  grad *= pref;
  if (want_hess) {
    hess *= pref;
    for (int a = 0; a < d_; ++a)
      for (int b = 0; b < a; ++b) hess(a, b) = hess(b, a);
  }
}

double kde(const Sample& sample, const KernelSpec& spec, double h, const Eigen::VectorXd& x) {
  return KdeEvaluator(sample, spec, h).value(x);
}

Eigen::VectorXd kde_grad(const Sample& sample, const KernelSpec& spec, double h,
                         const Eigen::VectorXd& x) {
  KdeEvaluator ev(sample, spec, h);
  double f;
  Eigen::VectorXd g;
  ev.value_grad(x, f, g);
  return g;
}

Eigen::MatrixXd kde_hess(const Sample& sample, const KernelSpec& spec, double h,
                         const Eigen::VectorXd& x) {
  KdeEvaluator ev(sample, spec, h);
  double f;
  Eigen::VectorXd g;
  Eigen::MatrixXd hess(sample.d(), sample.d());
  ev.value_grad_hess(x, f, g, hess);
  return hess;
}

namespace {

AscentProblem kde_ascent_problem(const KdeEvaluator& ev) {
  AscentProblem prob;
  prob.value = [&ev](const Eigen::VectorXd& x) { return ev.value(x); };
  prob.value_grad = [&ev](const Eigen::VectorXd& x, double& f, Eigen::VectorXd& g) {
    ev.value_grad(x, f, g);
  };
  prob.hess = [&ev](const Eigen::VectorXd& x, Eigen::MatrixXd& h) {
    double f;
    Eigen::VectorXd g;
    h.resize(ev.d(), ev.d());
    ev.value_grad_hess(x, f, g, h);
    return true;
  };
  prob.char_length = ev.h();
  prob.grad_scale = 1.0 / ev.h();
  prob.grad_tol_rel = kGradTolRelKme;
  return prob;
}

std::vector<Eigen::VectorXd> default_kme_starts(const Sample& sample, const KdeEvaluator& ev) {
  const int n = sample.n();
  std::vector<std::pair<double, int>> scored(n);
  for (int i = 0; i < n; ++i)
    scored[i] = {ev.value(sample.points.row(i).transpose()), i};
  const int keep = std::min(20, n);
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Eigen::VectorXd> starts;
  starts.reserve(keep);
  for (int k = 0; k < keep; ++k)
    starts.push_back(sample.points.row(scored[k].second).transpose());
  return starts;
}

} // namespace

EstimateReport kme(const Sample& sample, const KernelSpec& spec, double h,
                   const std::vector<Eigen::VectorXd>* starts) {
  KdeEvaluator ev(sample, spec, h);
  const std::vector<Eigen::VectorXd> start_set =
      starts != nullptr ? *starts : default_kme_starts(sample, ev);
  if (start_set.empty()) throw DomainError("kme: empty start set");
  const AscentProblem prob = kde_ascent_problem(ev);
  EstimateReport best;
  bool have = false;
  for (const auto& s : start_set) {
    const AscentOutcome out = ascend(prob, s);
    if (!out.converged) continue;
    if (!have || out.f > best.objective + 1e-14) {
      best.estimate = out.x;
      best.objective = out.f;
      best.iterations = out.iterations;
      best.converged = true;
      have = true;
    }
  }
  best.starts_tried = static_cast<int>(start_set.size());
  if (!have)
    throw SearchFailureError("kme: no start converged out of " +
                             std::to_string(start_set.size()));
  return best;
}

EstimateReport isme(const Sample& sample, const KernelSpec& spec, double h) {
  KdeEvaluator ev(sample, spec, h);
  const int n = sample.n();
  int best_i = 0;
  double best_f = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double f = ev.value(sample.points.row(i).transpose());
    if (f > best_f) {
      best_f = f;
      best_i = i;
    }
  }
  EstimateReport rep;
  rep.estimate = sample.points.row(best_i).transpose();
  rep.objective = best_f;
  rep.iterations = n;
  rep.starts_tried = n;
  rep.converged = true;
  return rep;
}

double mlr_objective(const Eigen::MatrixXd& x_sample, const Eigen::MatrixXd& y_sample,
                     const KernelSpec& spec, double h, const Eigen::MatrixXd& omega) {
  const auto n = x_sample.rows();
  const auto dx = x_sample.cols();
  const auto dy = y_sample.cols();
  if (y_sample.rows() != n) throw ShapeError("mlr_objective: x/y row mismatch");
  if (omega.rows() != dy || omega.cols() != dx)
    throw ShapeError("mlr_objective: coefficient matrix must be dY x dX");
  if (spec.d() != dy) throw ShapeError("mlr_objective: kernel dimension must equal dY");
  if (!(h > 0.0)) throw DomainError("mlr_objective: bandwidth must be positive");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd r =
        (omega * x_sample.row(i).transpose() - y_sample.row(i).transpose()) / h;
    acc += spec.value(r);
  }
  return acc / (static_cast<double>(n) * std::pow(h, static_cast<int>(dy)));
}

EstimateReport mlr_fit(const Eigen::MatrixXd& x_sample, const Eigen::VectorXd& y_sample,
                       const KernelSpec& spec, double h) {
  const auto n = x_sample.rows();
  const auto dx = x_sample.cols();
  if (y_sample.size() != n) throw ShapeError("mlr_fit: x/y row mismatch");
  if (spec.d() != 1) throw ShapeError("mlr_fit: scalar response requires a univariate kernel");
  if (!(h > 0.0)) throw DomainError("mlr_fit: bandwidth must be positive");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x_sample);
  if (qr.rank() < dx) throw DesignError("mlr_fit: rank-deficient design matrix");
  const Eigen::VectorXd w_ls = qr.solve(y_sample);
  const Eigen::VectorXd resid = y_sample - x_sample * w_ls;
  const double sigma = std::sqrt(resid.squaredNorm() / static_cast<double>(n));

  const Eigen::MatrixXd xtx = x_sample.transpose() * x_sample;
  const Eigen::MatrixXd xtx_inv =
      xtx.ldlt().solve(Eigen::MatrixXd::Identity(dx, dx));
  Eigen::VectorXd coef_scale(dx);
  for (Eigen::Index j = 0; j < dx; ++j)
    coef_scale(j) = sigma * std::sqrt(std::max(xtx_inv(j, j), 0.0) * static_cast<double>(n));

  std::vector<Eigen::VectorXd> starts = {w_ls};
  if (sigma > 0.0) {
    for (Eigen::Index j = 0; j < dx; ++j) {
      for (int s = -1; s <= 1; s += 2) {
        Eigen::VectorXd w = w_ls;
        w(j) += s * coef_scale(j);
        starts.push_back(w);
      }
    }
    Rng rng(0x6d6c7266u);  // fixed stream; the fit itself is deterministic
    for (int k = 0; k < 4; ++k) {
      Eigen::VectorXd w = w_ls;
      for (Eigen::Index j = 0; j < dx; ++j) w(j) += 0.5 * coef_scale(j) * rng.normal();
      starts.push_back(w);
    }
  }

  const auto& g = spec.profile();
  const double xnorm = std::max(x_sample.rowwise().norm().mean(), 1e-12);
  AscentProblem prob;
  prob.value = [&](const Eigen::VectorXd& w) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      acc += g(std::fabs(x_sample.row(i).dot(w) - y_sample(i)) / h);
    return acc / (static_cast<double>(n) * h);
  };
  prob.value_grad = [&](const Eigen::VectorXd& w, double& f, Eigen::VectorXd& grad) {
    double acc = 0.0;
    grad.setZero(dx);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = (x_sample.row(i).dot(w) - y_sample(i)) / h;
      const double a = std::fabs(u);
      acc += g(a);
      const double s = (u > 0.0) - (u < 0.0);
      grad += (g.deriv(a) * s) * x_sample.row(i).transpose();
    }
    const double pref = 1.0 / (static_cast<double>(n) * h);
    f = acc * pref;
    grad *= pref / h;
  };
  prob.hess = [&](const Eigen::VectorXd& w, Eigen::MatrixXd& hess) {
    hess.setZero(dx, dx);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = (x_sample.row(i).dot(w) - y_sample(i)) / h;
      hess += g.deriv2(std::fabs(u)) * (x_sample.row(i).transpose() * x_sample.row(i));
    }
    hess /= static_cast<double>(n) * h * h * h;
    return true;
  };
  prob.char_length = h / xnorm;
  prob.grad_scale = xnorm / h;
  prob.grad_tol_rel = kGradTolRelMlr;

  EstimateReport best;
  bool have = false;
  for (const auto& s : starts) {
    const AscentOutcome out = ascend(prob, s);
    if (!out.converged) continue;
    if (!have || out.f > best.objective + 1e-14) {
      best.estimate = out.x;
      best.objective = out.f;
      best.iterations = out.iterations;
      best.converged = true;
      have = true;
    }
  }
  best.starts_tried = static_cast<int>(starts.size());
  if (!have)
    throw SearchFailureError("mlr_fit: no start converged out of " +
                             std::to_string(starts.size()));
  return best;
}

std::pair<double, double> mlr_amse_oracle(const density::GaussianMixture& x_dist,
                                          const density::GaussianMixture& noise,
                                          const Eigen::RowVectorXd& theta,
                                          const KernelSpec& spec, long n, long mc_draws,
                                          std::uint64_t seed) {
  if (noise.dim() != 1) throw ShapeError("mlr_amse_oracle: noise must be univariate");
  if (spec.d() != 1) throw ShapeError("mlr_amse_oracle: kernel must be univariate");
  const int dx = x_dist.dim();
  if (theta.size() != dx) throw ShapeError("mlr_amse_oracle: theta length mismatch");
  const int q = spec.q();

  const Eigen::VectorXd noise_mode = density::find_mode(noise);
  if (std::fabs(noise_mode(0)) > 1e-6)
    throw DomainError("mlr_amse_oracle: noise mode must sit at 0 (found " +
                      std::to_string(noise_mode(0)) + ")");
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const double g0 = noise.pdf(zero);
  const double g2 = noise.partial({2}, zero);
  if (!(g2 < 0.0)) throw DomainError("mlr_amse_oracle: noise mode is not a proper maximum");
  const double gq1 = noise.partial({q + 1}, zero);

  Rng rng(seed, {0xA5});
  Eigen::VectorXd ex = Eigen::VectorXd::Zero(dx);
  Eigen::MatrixXd exx = Eigen::MatrixXd::Zero(dx, dx);
  for (long t = 0; t < mc_draws; ++t) {
    const Eigen::VectorXd x = density::draw(x_dist, rng);
    ex += x;
    exx += x * x.transpose();
  }
  ex /= static_cast<double>(mc_draws);
  exx /= static_cast<double>(mc_draws);

  const double bq = 2.0 * moments::moment_B(spec.profile(), q);  // full-line q-th moment
  const double vv = 2.0 * moments::moment_V(spec.profile(), 1);  // integral of K'^2
  const Eigen::MatrixXd A = (g2 * exx).inverse();
  const Eigen::VectorXd b = (bq / std::exp(specialfn::log_gamma(q + 1.0))) * gq1 * ex;
  const Eigen::MatrixXd V = g0 * vv * exx;
  const double ab2 = (A * b).squaredNorm();
  if (std::sqrt(ab2) <= 1e-12 * std::max(1.0, A.norm() * b.norm()))
    throw DegenerateBiasError("mlr_amse_oracle: leading bias vanishes");
  const double travA = (A * V * A).trace();
  const int dy = 1;
  const double expo = 1.0 / (dy + 2.0 * q + 2.0);
  const double h = std::pow((dy + 2.0) * travA / (2.0 * q * static_cast<double>(n) * ab2), expo);
  const double amse = 2.0 * q / (dy + 2.0 * q + 2.0) * std::pow(ab2, (dy + 2.0) * expo) *
                      std::pow((dy + 2.0) / (2.0 * q * static_cast<double>(n)) * travA,
                               2.0 * q * expo);
  return {h, amse};
}

ClusterResult cluster_1d(const Sample& sample, const KernelSpec& spec, double h,
                         const density::GaussianMixture& truth) {
  if (sample.d() != 1) throw ShapeError("cluster_1d: sample must be univariate");
  if (truth.dim() != 1) throw ShapeError("cluster_1d: truth must be univariate");
  const double zeta = density::find_antimode_1d(truth);

  KdeEvaluator ev(sample, spec, h);
  const double lo = ev.lo()(0) - h, hi = ev.hi()(0) + h;
  const int kGrid = 512;
  std::vector<double> val(kGrid);
  Eigen::VectorXd x(1);
  for (int i = 0; i < kGrid; ++i) {
    x(0) = lo + (hi - lo) * i / (kGrid - 1);
    val[i] = ev.value(x);
  }
  const AscentProblem prob = kde_ascent_problem(ev);
  std::vector<std::pair<double, double>> modes;  // (location, value)
  for (int i = 1; i + 1 < kGrid; ++i) {
    if (!(val[i] >= val[i - 1] && val[i] > val[i + 1])) continue;
    x(0) = lo + (hi - lo) * i / (kGrid - 1);
    const AscentOutcome out = ascend(prob, x);
    if (!out.converged) continue;
    bool dup = false;
    for (auto& m : modes)
      if (std::fabs(m.first - out.x(0)) <= 1e-6 * (hi - lo)) {
        dup = true;
        break;
      }
    if (!dup) modes.emplace_back(out.x(0), out.f);
  }
  if (modes.size() < 2)
    throw TopologyError("cluster_1d: density estimate is not bimodal at this bandwidth");
  std::sort(modes.begin(), modes.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  double a = modes[0].first, b = modes[1].first;
  if (a > b) std::swap(a, b);

  // golden-section minimum of the estimate between the two modes
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  auto fv = [&](double t) {
    Eigen::VectorXd p(1);
    p(0) = t;
    return ev.value(p);
  };
  double ga = a, gb = b;
  double x1 = gb - gr * (gb - ga), x2 = ga + gr * (gb - ga);
  double f1 = fv(x1), f2 = fv(x2);
  for (int it = 0; it < 200 && (gb - ga) > 1e-12 * (1.0 + std::fabs(ga)); ++it) {
    if (f1 < f2) {
      gb = x2;
      x2 = x1;
      f2 = f1;
      x1 = gb - gr * (gb - ga);
      f1 = fv(x1);
    } else {
      ga = x1;
      x1 = x2;
      f1 = f2;
      x2 = ga + gr * (gb - ga);
      f2 = fv(x2);
    }
  }
  double zn = 0.5 * (ga + gb);
  for (int it = 0; it < 60; ++it) {
    Eigen::VectorXd p(1);
    p(0) = zn;
    double f;
    Eigen::VectorXd grad(1);
    Eigen::MatrixXd hess(1, 1);
    ev.value_grad_hess(p, f, grad, hess);
    if (std::fabs(grad(0)) <= 1e-12 * std::max(f / h, 1e-300) || hess(0, 0) <= 0.0) break;
    const double step = grad(0) / hess(0, 0);
    const double cand = zn - step;
    if (cand <= a || cand >= b) break;
    zn = cand;
  }

  ClusterResult res;
  res.zeta_n = zn;
  res.cer = std::fabs(truth.cdf_1d(zn) - truth.cdf_1d(zeta));
  res.mode_lo = a;
  res.mode_hi = b;
  return res;
}

} // namespace modalkit::estimators
