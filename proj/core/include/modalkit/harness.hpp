#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modalkit/density.hpp"
#include "modalkit/kernels.hpp"

#include "json.hpp"

namespace modalkit::harness {

enum class Task { kme, isme, cluster };

Task task_from_string(const std::string& s);
std::string to_string(Task t);

struct SimConfig {
  int d = 1;
  int q = 2;
  std::vector<std::string> kernels;  // e.g. "biweight", "pk:epanechnikov"
  std::vector<long> n_grid;          // sorted ascending
  int trials = 300;
  std::uint64_t seed = 0;
  std::string density = "skew-gauss-1d";  // preset name
  Task task = Task::kme;
  int threads = 0;  // 0 -> MODALKIT_THREADS env, else hardware

  nlohmann::json to_json() const;
  static SimConfig from_json(const nlohmann::json& j);
  void validate() const;
};

struct CellResult {
  std::string kernel;
  long n = 0;
  double h_opt = 0.0;
  double mse = 0.0;       // mean of per-trial squared errors (or mean CER)
  double sd = 0.0;        // standard error of that mean
  double mse_ratio = 1.0; // vs the reference kernel at the same n
  double welch_p = 1.0;   // vs the best kernel at the same n
  int trials_completed = 0;
  int failures = 0;
  // clustering extras
  double mean_absdev = 0.0;  // mean |zeta_n - zeta|
  double amcer = 0.0;        // f(zeta) * mean_absdev
  std::vector<double> per_trial;  // squared errors (or CERs), trial order
};

struct SimResult {
  SimConfig cfg;
  std::vector<CellResult> cells;  // kernel-major, n-minor

  const CellResult& cell(const std::string& kernel, long n) const;
  std::string to_csv(int precision = 12) const;
  std::string to_markdown() const;
};

//! Mean-squared-error campaign for the mode estimators; trials are
//! independently seeded by (trial, n-index, kernel-index) substreams, so
//! results are identical for any thread count and any trial chunking.
SimResult run_mse_campaign(const SimConfig& cfg);
SimResult run_mse_campaign(const SimConfig& cfg, const density::GaussianMixture& mixture);

//! As above but computing only trials in [trial_begin, trial_end);
//! aggregates from chunks merge exactly (per-trial values are identical).
SimResult run_mse_campaign_range(const SimConfig& cfg, const density::GaussianMixture& mixture,
                                 int trial_begin, int trial_end);

//! Clustering error campaign (1-d): mean CER, mean |zeta_n - zeta| and the
//! asymptotic mean-CER prediction f(zeta) * E|zeta_n - zeta| per cell.
SimResult run_cer_campaign(const SimConfig& cfg);
SimResult run_cer_campaign(const SimConfig& cfg, const density::GaussianMixture& mixture);

//! Resolve a worker count: request > 0 wins, then MODALKIT_THREADS, then
//! hardware concurrency.
int thread_count(int requested);

//! Merge per-trial vectors of two chunked runs of the same config.
SimResult merge_chunks(const SimResult& a, const SimResult& b);

} // namespace modalkit::harness
