#include "modalkit/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "modalkit/estimators.hpp"
#include "modalkit/stats.hpp"

namespace modalkit::harness {

using estimators::KdeEvaluator;
using estimators::Sample;
using kernels::KernelSpec;

Task task_from_string(const std::string& s) {
  if (s == "kme") return Task::kme;
  if (s == "isme") return Task::isme;
  if (s == "cluster") return Task::cluster;
  throw DomainError("unknown task '" + s + "' (known: kme, isme, cluster)");
}

std::string to_string(Task t) {
  switch (t) {
    case Task::kme: return "kme";
    case Task::isme: return "isme";
    case Task::cluster: return "cluster";
  }
  return "?";
}

void SimConfig::validate() const {
  if (trials < 2) throw DomainError("SimConfig: trials must be >= 2");
  if (kernels.empty()) throw DomainError("SimConfig: no kernels given");
  if (n_grid.empty()) throw DomainError("SimConfig: empty n grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] < n_grid[i - 1]) throw DomainError("SimConfig: n grid must be ascending");
  for (long n : n_grid)
    if (n < 2) throw DomainError("SimConfig: sample sizes must be >= 2");
  if (task == Task::cluster && d != 1)
    throw DomainError("SimConfig: the cluster task is univariate");
}

nlohmann::json SimConfig::to_json() const {
  nlohmann::json j;
  j["d"] = d;
  j["q"] = q;
  j["kernels"] = kernels;
  j["n_grid"] = n_grid;
  j["trials"] = trials;
  j["seed"] = seed;
  j["density"] = density;
  j["task"] = to_string(task);
  if (threads > 0) j["threads"] = threads;
  return j;
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
  SimConfig c;
  c.d = j.value("d", 1);
  c.q = j.value("q", 2);
  c.kernels = j.at("kernels").get<std::vector<std::string>>();
  c.n_grid = j.at("n_grid").get<std::vector<long>>();
  c.trials = j.value("trials", 300);
  c.seed = j.value("seed", static_cast<std::uint64_t>(0));
  c.density = j.value("density", std::string("skew-gauss-1d"));
  c.task = task_from_string(j.value("task", std::string("kme")));
  c.threads = j.value("threads", 0);
  c.validate();
  return c;
}

int thread_count(int requested) {
  if (requested > 0) return std::min(requested, 256);
  if (const char* env = std::getenv("MODALKIT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return std::min(v, 256);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

//! Search starts for the campaign runs: a coarse scan of the density
//! estimate (grid in 1-d, strided sample points otherwise), subquadratic
//! for every kernel in play.
std::vector<Eigen::VectorXd> campaign_starts(const Sample& sample, const KdeEvaluator& ev,
                                             int keep) {
  std::vector<std::pair<double, Eigen::VectorXd>> scored;
  if (sample.d() == 1) {
    const double lo = ev.lo()(0), hi = ev.hi()(0);
    const int kGrid = 256;
    Eigen::VectorXd x(1);
    std::vector<double> val(kGrid);
    for (int i = 0; i < kGrid; ++i) {
      x(0) = lo + (hi - lo) * i / (kGrid - 1);
      val[i] = ev.value(x);
    }
    for (int i = 1; i + 1 < kGrid; ++i) {
      if (val[i] >= val[i - 1] && val[i] > val[i + 1]) {
        x(0) = lo + (hi - lo) * i / (kGrid - 1);
        scored.emplace_back(val[i], x);
      }
    }
    if (scored.empty()) {
      int ibest = 0;
      for (int i = 1; i < kGrid; ++i)
        if (val[i] > val[ibest]) ibest = i;
      x(0) = lo + (hi - lo) * ibest / (kGrid - 1);
      scored.emplace_back(val[ibest], x);
    }
  } else {
    const int stride = std::max(1, sample.n() / 512);
    for (int i = 0; i < sample.n(); i += stride) {
      const Eigen::VectorXd x = sample.points.row(i).transpose();
      scored.emplace_back(ev.value(x), x);
    }
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Eigen::VectorXd> starts;
  for (int i = 0; i < static_cast<int>(scored.size()) && i < keep; ++i)
    starts.push_back(scored[i].second);
  return starts;
}

struct TrialValue {
  double primary = 0.0;    // squared error, or CER
  double secondary = 0.0;  // |zeta_n - zeta| for clustering
  bool failed = true;
};

struct CampaignEngine {
  const SimConfig& cfg;
  const density::GaussianMixture& mixture;
  std::vector<KernelSpec> specs;
  std::vector<std::vector<double>> h;  // [kernel][n_idx]
  Eigen::VectorXd theta;               // mode (mse campaign)
  double zeta = 0.0;                   // antimode (cluster campaign)
  double f_zeta = 0.0;

  CampaignEngine(const SimConfig& c, const density::GaussianMixture& m) : cfg(c), mixture(m) {
    cfg.validate();
    if (mixture.dim() != cfg.d) throw ShapeError("campaign: density dimension mismatch");
    for (const auto& name : cfg.kernels) specs.push_back(KernelSpec::by_name(name, cfg.d, cfg.q));
    h.assign(specs.size(), std::vector<double>(cfg.n_grid.size(), 0.0));
    if (cfg.task == Task::cluster) {
      zeta = density::find_antimode_1d(mixture);
      Eigen::VectorXd zv(1);
      zv(0) = zeta;
      f_zeta = mixture.pdf(zv);
      for (std::size_t k = 0; k < specs.size(); ++k)
        for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni)
          h[k][ni] = density::asymptotics_at(mixture, specs[k], cfg.n_grid[ni], zv).h_opt;
    } else {
      theta = density::find_mode(mixture);
      for (std::size_t k = 0; k < specs.size(); ++k)
        for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni)
          h[k][ni] = density::asymptotics(mixture, specs[k], cfg.n_grid[ni]).h_opt;
    }
  }

  TrialValue run_trial(std::size_t k, std::size_t ni, int trial) const {
    TrialValue tv;
    try {
      Rng rng(cfg.seed, {static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(ni),
                         static_cast<std::uint64_t>(k)});
      const long n = cfg.n_grid[ni];
      Sample sample(density::draw_matrix(mixture, static_cast<int>(n), rng));
      const double hv = h[k][ni];
      if (cfg.task == Task::cluster) {
        const auto res = estimators::cluster_1d(sample, specs[k], hv, mixture);
        tv.primary = res.cer;
        tv.secondary = std::fabs(res.zeta_n - zeta);
      } else {
        Eigen::VectorXd est;
        if (cfg.task == Task::isme) {
          est = estimators::isme(sample, specs[k], hv).estimate;
        } else {
          KdeEvaluator ev(sample, specs[k], hv);
          const auto starts = campaign_starts(sample, ev, 6);
          est = estimators::kme(sample, specs[k], hv, &starts).estimate;
        }
        tv.primary = (est - theta).squaredNorm();
      }
      tv.failed = false;
    } catch (const Error&) {
      tv.failed = true;
    }
    return tv;
  }
};

void finalize(SimResult& res) {
  const auto& cfg = res.cfg;
  // per-cell aggregates
  for (auto& c : res.cells) {
    c.trials_completed = static_cast<int>(c.per_trial.size());
    if (!c.per_trial.empty()) {
      c.mse = stats::mean(c.per_trial);
      c.sd = c.per_trial.size() > 1
                 ? std::sqrt(stats::variance(c.per_trial) / c.per_trial.size())
                 : 0.0;
    }
  }
  // reference kernel: the radial optimal hierarchy ("biweight") if listed
  std::size_t ref = 0;
  for (std::size_t k = 0; k < cfg.kernels.size(); ++k)
    if (cfg.kernels[k] == "biweight") ref = k;
  const std::size_t nn = cfg.n_grid.size();
  for (std::size_t ni = 0; ni < nn; ++ni) {
    std::size_t best = 0;
    double best_mse = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cfg.kernels.size(); ++k) {
      const auto& c = res.cells[k * nn + ni];
      if (c.trials_completed > 0 && c.mse < best_mse) {
        best_mse = c.mse;
        best = k;
      }
    }
    const auto& refc = res.cells[ref * nn + ni];
    const auto& bestc = res.cells[best * nn + ni];
    for (std::size_t k = 0; k < cfg.kernels.size(); ++k) {
      auto& c = res.cells[k * nn + ni];
      c.mse_ratio = refc.mse > 0.0 ? c.mse / refc.mse : std::numeric_limits<double>::quiet_NaN();
      c.welch_p = (c.trials_completed > 1 && bestc.trials_completed > 1)
                      ? stats::welch_test(c.per_trial, bestc.per_trial)
                      : 1.0;
    }
  }
}

SimResult run_campaign(const SimConfig& cfg, const density::GaussianMixture& mixture,
                       int trial_begin, int trial_end) {
  CampaignEngine eng(cfg, mixture);
  const std::size_t nk = eng.specs.size(), nn = cfg.n_grid.size();
  const int ntr = trial_end - trial_begin;
  if (ntr < 0) throw DomainError("campaign: empty trial range");
  std::vector<TrialValue> values(nk * nn * ntr);

  const long total = static_cast<long>(values.size());
  std::atomic<long> cursor(0);
  const int workers = std::min<long>(thread_count(cfg.threads), std::max(1L, total));
  auto work = [&]() {
    while (true) {
      const long idx = cursor.fetch_add(1);
      if (idx >= total) break;
      const std::size_t k = idx / (nn * ntr);
      const std::size_t ni = (idx / ntr) % nn;
      const int trial = trial_begin + static_cast<int>(idx % ntr);
      values[idx] = eng.run_trial(k, ni, trial);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  SimResult res;
  res.cfg = cfg;
  res.cells.resize(nk * nn);
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t ni = 0; ni < nn; ++ni) {
      CellResult& c = res.cells[k * nn + ni];
      c.kernel = cfg.kernels[k];
      c.n = cfg.n_grid[ni];
      c.h_opt = eng.h[k][ni];
      double absdev = 0.0;
      for (int t = 0; t < ntr; ++t) {
        const TrialValue& tv = values[(k * nn + ni) * ntr + t];
        if (tv.failed) {
          ++c.failures;
        } else {
          c.per_trial.push_back(tv.primary);
          absdev += tv.secondary;
        }
      }
      if (!c.per_trial.empty() && cfg.task == Task::cluster) {
        c.mean_absdev = absdev / static_cast<double>(c.per_trial.size());
        c.amcer = eng.f_zeta * c.mean_absdev;
      }
    }
  }
  finalize(res);
  return res;
}

} // namespace

SimResult run_mse_campaign(const SimConfig& cfg) {
  return run_mse_campaign(cfg, density::preset(cfg.density));
}

SimResult run_mse_campaign(const SimConfig& cfg, const density::GaussianMixture& mixture) {
  return run_campaign(cfg, mixture, 0, cfg.trials);
}

SimResult run_mse_campaign_range(const SimConfig& cfg, const density::GaussianMixture& mixture,
                                 int trial_begin, int trial_end) {
  return run_campaign(cfg, mixture, trial_begin, trial_end);
}

SimResult run_cer_campaign(const SimConfig& cfg) {
  return run_cer_campaign(cfg, density::preset(cfg.density));
}

SimResult run_cer_campaign(const SimConfig& cfg, const density::GaussianMixture& mixture) {
  if (cfg.task != Task::cluster)
    throw DomainError("run_cer_campaign: config task must be 'cluster'");
  return run_campaign(cfg, mixture, 0, cfg.trials);
}

SimResult merge_chunks(const SimResult& a, const SimResult& b) {
  if (a.cells.size() != b.cells.size()) throw ShapeError("merge_chunks: cell count mismatch");
  SimResult out = a;
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    auto& c = out.cells[i];
    const auto& cb = b.cells[i];
    if (c.kernel != cb.kernel || c.n != cb.n)
      throw ShapeError("merge_chunks: cell layout mismatch");
    const std::size_t na = c.per_trial.size(), nb = cb.per_trial.size();
    if (out.cfg.task == Task::cluster && na + nb > 0) {
      c.mean_absdev = (c.mean_absdev * na + cb.mean_absdev * nb) / double(na + nb);
      c.amcer = (c.amcer * na + cb.amcer * nb) / double(na + nb);
    }
    c.per_trial.insert(c.per_trial.end(), cb.per_trial.begin(), cb.per_trial.end());
    c.failures += cb.failures;
  }
  finalize(out);
  return out;
}

const CellResult& SimResult::cell(const std::string& kernel, long n) const {
  for (const auto& c : cells)
    if (c.kernel == kernel && c.n == n) return c;
  throw DomainError("SimResult::cell: no cell for " + kernel + ", n=" + std::to_string(n));
}

std::string SimResult::to_csv(int precision) const {
  const bool cluster = cfg.task == Task::cluster;
  std::string out = cluster
      ? "kernel,n,h_opt,trials,failures,mean_cer,sd,cer_ratio,welch_p,mean_absdev,amcer\n"
      : "kernel,n,h_opt,trials,failures,mse,sd,mse_ratio,welch_p\n";
  char buf[512];
  for (const auto& c : cells) {
    if (cluster) {
      std::snprintf(buf, sizeof buf,
                    "%s,%ld,%.*g,%d,%d,%.*g,%.*g,%.*g,%.*g,%.*g,%.*g\n", c.kernel.c_str(), c.n,
                    precision, c.h_opt, c.trials_completed, c.failures, precision, c.mse,
                    precision, c.sd, precision, c.mse_ratio, precision, c.welch_p, precision,
                    c.mean_absdev, precision, c.amcer);
    } else {
      std::snprintf(buf, sizeof buf, "%s,%ld,%.*g,%d,%d,%.*g,%.*g,%.*g,%.*g\n", c.kernel.c_str(),
                    c.n, precision, c.h_opt, c.trials_completed, c.failures, precision, c.mse,
                    precision, c.sd, precision, c.mse_ratio, precision, c.welch_p);
    }
    out += buf;
  }
  return out;
}

std::string SimResult::to_markdown() const {
  const bool cluster = cfg.task == Task::cluster;
  const std::size_t nn = cfg.n_grid.size();
  std::string out = "| Kernel |";
  for (long n : cfg.n_grid) out += " n=" + std::to_string(n) + " |";
  out += cluster ? " CER ratio |\n" : " MSE ratio |\n";
  out += "|---|";
  for (std::size_t i = 0; i <= nn; ++i) out += "---|";
  out += "\n";
  // best cell per column gets bold, significantly worse cells get a star
  std::vector<double> best(nn, std::numeric_limits<double>::infinity());
  for (const auto& c : cells)
    for (std::size_t ni = 0; ni < nn; ++ni)
      if (c.n == cfg.n_grid[ni]) best[ni] = std::min(best[ni], c.mse);
  char buf[256];
  for (std::size_t k = 0; k < cfg.kernels.size(); ++k) {
    out += "| " + cfg.kernels[k] + " |";
    double ratio = 1.0;
    for (std::size_t ni = 0; ni < nn; ++ni) {
      const auto& c = cells[k * nn + ni];
      const bool is_best = c.mse <= best[ni];
      const bool worse = c.welch_p < 0.05 && !is_best;
      std::snprintf(buf, sizeof buf, "%s%.4f+-%.4f%s%s", is_best ? "**" : "", 100.0 * c.mse,
                    100.0 * c.sd, is_best ? "**" : "", worse ? " \\*" : "");
      out += std::string(" ") + buf + " |";
      if (ni + 1 == nn) ratio = c.mse_ratio;
    }
    std::snprintf(buf, sizeof buf, " [%.4f] |", ratio);
    out += buf;
    out += "\n";
  }
  return out;
}

} // namespace modalkit::harness
