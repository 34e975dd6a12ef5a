#pragma once

#include <vector>

namespace modalkit::stats {

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;
};

//! Two-sided unequal-variance t-test with Welch-Satterthwaite dof.
WelchResult welch_detail(const std::vector<double>& a, const std::vector<double>& b);

//! p-value only.
double welch_test(const std::vector<double>& a, const std::vector<double>& b);

double mean(const std::vector<double>& v);
//! Unbiased sample variance.
double variance(const std::vector<double>& v);

} // namespace modalkit::stats
