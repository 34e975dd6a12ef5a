#include "modalkit/stats.hpp"

#include <cmath>

#include "modalkit/errors.hpp"
#include "modalkit/specialfn.hpp"

namespace modalkit::stats {

double mean(const std::vector<double>& v) {
  if (v.empty()) throw DomainError("mean: empty input");
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  if (v.size() < 2) throw DomainError("variance: need at least two values");
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

WelchResult welch_detail(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2)
    throw UndefinedTestError("welch_test: both samples need at least two values");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double va = variance(a), vb = variance(b);
  if (va == 0.0 && vb == 0.0)
    throw UndefinedTestError("welch_test: both samples have zero variance");
  const double se2 = va / na + vb / nb;
  WelchResult r;
  r.t = (mean(a) - mean(b)) / std::sqrt(se2);
  r.dof = se2 * se2 /
          ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
  if (r.t == 0.0) {
    r.p = 1.0;
    return r;
  }
  r.p = 2.0 * specialfn::student_t_cdf(-std::fabs(r.t), r.dof);
  return r;
}

double welch_test(const std::vector<double>& a, const std::vector<double>& b) {
  return welch_detail(a, b).p;
}

} // namespace modalkit::stats
