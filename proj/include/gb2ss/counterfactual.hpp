#ifndef GB2SS_COUNTERFACTUAL_HPP_
#define GB2SS_COUNTERFACTUAL_HPP_

#include <string>
#include <vector>

#include "gb2ss/mcmc.hpp"

namespace gb2ss {

struct CounterfactualSpec {
  Eigen::Index index = 1;  // covariate to remove, 1-based
  std::string label;
};

// Copy of x with element `index` (1-based) set to zero.
VectorXd zero_covariate(const VectorXd& x, Eigen::Index index);

// h - Z(x) beta + Z(x with index zeroed) beta, evaluated as
// h_i - x_index * beta_{i*d + index - 1} so that a zero covariate or zero
// coefficient returns h unchanged.
Vec4 counterfactual_state(const Vec4& h, const VectorXd& x,
                          const VectorXd& beta, Eigen::Index index);

// [draw][period]. Requires a dynamic chain whose d matches covs.
std::vector<std::vector<LatentState>> counterfactual_states(
    const Chain& chain, const CovariatePanel& covs,
    const CounterfactualSpec& spec);

struct CounterfactualPath {
  CounterfactualSpec spec;
  std::vector<IntervalSummary> counterfactual;  // per period
  std::vector<IntervalSummary> difference;      // actual - counterfactual, paired
};

struct GiniPathReport {
  std::vector<std::string> periods;
  std::vector<IntervalSummary> actual;
  std::vector<CounterfactualPath> paths;
};

GiniPathReport gini_paths(const Chain& chain,
                          const std::vector<CounterfactualSpec>& specs,
                          const CovariatePanel& covs, unsigned threads = 1);

}  // namespace gb2ss

#endif  // GB2SS_COUNTERFACTUAL_HPP_
