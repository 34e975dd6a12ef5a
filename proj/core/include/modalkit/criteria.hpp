#pragma once

#include <map>
#include <string>
#include <vector>

#include "modalkit/kernels.hpp"

namespace modalkit::criteria {

enum class CriterionKind { rk_amse, pk_amse, pk_lower_bound, singular_al2pe };

struct CriterionValue {
  double value;
  int d;
  int q;
  CriterionKind kind;
};

//! (B_{d,q}^{2(d+2)} V_{d,1}^{2q})^{1/(d+2q+2)}, evaluated in log space.
CriterionValue rk_criterion(const kernels::RadialProfile& profile);

//! Criterion ratio against the optimal hierarchy member with the same (d, q).
//! Valid for radial kernels (the density-dependent factor cancels).
double amse_ratio(const kernels::RadialProfile& profile, int d, int q);

//! [(B_{1,q}^6 V_{1,1}^{2q}) (B_{1,q}^2 V_{1,0}^{2q})^{d-1}]^{1/(d+2q+2)}
//! for the product kernel built from a univariate symmetric factor.
CriterionValue pk_criterion(const kernels::RadialProfile& factor, int d);

//! Error ratio of a 2nd-order product kernel to the optimal radial kernel;
//! q = 2 is the one case where this is density-free.
double pk_amse_ratio_q2(const kernels::RadialProfile& factor, int d);

//! Lower bound of the product-kernel criterion, mixing the optimal
//! univariate hierarchy with the nonnegative-optimal one.
CriterionValue pk_lower_bound(int d, int q);

//! Density-free bound ratio of product to radial kernels at q = 2;
//! exactly 1 at d = 1 and strictly increasing in d.
double rk_vs_pk_ratio_q2(int d);

//! (B_{1,q}^6 V_{1,1}^{2q})^{1/(2q+3)} for the flat-top (singular) setting;
//! the kernel must satisfy the relaxed moment condition for (p, q).
CriterionValue singular_criterion(const kernels::RadialProfile& kernel, int p, int q);

struct CatalogEntry {
  std::string name;
  kernels::RadialProfile profile;
  std::map<int, double> b_moments;  // tabulated closed-form constants
  double v11;
};

//! The ten univariate 2nd-order kernels plus the order-4 and order-6
//! hierarchy members, with their tabulated constants as validation targets.
std::vector<CatalogEntry> named_univariate_catalog();

} // namespace modalkit::criteria
