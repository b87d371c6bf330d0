#include "gb2ss/counterfactual.hpp"

#include <string>

#include "gb2ss/errors.hpp"

namespace gb2ss {
namespace {

void check_index(Eigen::Index index, Eigen::Index d) {
  if (index < 1 || index > d) {
    throw DimensionError("counterfactual: covariate index " +
                         std::to_string(index) + " outside 1.." +
                         std::to_string(d));
  }
}

std::vector<std::vector<LatentState>> actual_states(const Chain& chain) {
  std::vector<std::vector<LatentState>> out(chain.draws.size());
  for (std::size_t m = 0; m < chain.draws.size(); ++m) out[m] = chain.draws[m].H;
  return out;
}

}  // namespace

VectorXd zero_covariate(const VectorXd& x, Eigen::Index index) {
  check_index(index, x.size());
  VectorXd out = x;
  out[index - 1] = 0.0;
  return out;
}

Vec4 counterfactual_state(const Vec4& h, const VectorXd& x,
                          const VectorXd& beta, Eigen::Index index) {
  const Eigen::Index d = x.size();
  check_index(index, d);
  if (beta.size() != 4 * d) {
    throw DimensionError("counterfactual: beta must have 4d elements");
  }
  const double xl = x[index - 1];
  Vec4 out = h;
  for (Eigen::Index i = 0; i < 4; ++i) out[i] -= xl * beta[i * d + index - 1];
  return out;
}

std::vector<std::vector<LatentState>> counterfactual_states(
    const Chain& chain, const CovariatePanel& covs,
    const CounterfactualSpec& spec) {
  if (chain.kind != ModelKind::Dynamic) {
    throw DataError("counterfactual: requires a dynamic-model chain");
  }
  if (covs.periods() != chain.periods()) {
    throw DimensionError("counterfactual: chain has " +
                         std::to_string(chain.periods()) +
                         " periods, covariates " +
                         std::to_string(covs.periods()));
  }
  if (covs.dim() != chain.covariate_dim) {
    throw DimensionError("counterfactual: covariate dimension differs from chain");
  }
  check_index(spec.index, covs.dim());
  std::vector<std::vector<LatentState>> out(chain.draws.size());
  for (std::size_t m = 0; m < chain.draws.size(); ++m) {
    const ChainDraw& draw = chain.draws[m];
    out[m].reserve(chain.periods());
    for (std::size_t t = 0; t < chain.periods(); ++t) {
      out[m].emplace_back(
          counterfactual_state(draw.H[t].h, covs.x(t), draw.B[t], spec.index));
    }
  }
  return out;
}

GiniPathReport gini_paths(const Chain& chain,
                          const std::vector<CounterfactualSpec>& specs,
                          const CovariatePanel& covs, unsigned threads) {
  if (chain.draws.empty()) throw DataError("gini_paths: chain has no draws");
  const std::size_t T = chain.periods();
  const std::size_t M = chain.draws.size();
  GiniPathReport report;
  report.periods = chain.labels;

  const auto actual = gini_draws(actual_states(chain), threads);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> v;
    std::size_t excluded = 0;
    for (std::size_t m = 0; m < M; ++m) {
      if (actual[m][t]) {
        v.push_back(*actual[m][t]);
      } else {
        ++excluded;
      }
    }
    report.actual.push_back(summarize_values(std::move(v), excluded));
  }

  for (const CounterfactualSpec& spec : specs) {
    const auto cf = gini_draws(counterfactual_states(chain, covs, spec), threads);
    CounterfactualPath path;
    path.spec = spec;
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<double> level, diff;
      std::size_t excluded_level = 0, excluded_pair = 0;
      for (std::size_t m = 0; m < M; ++m) {
        if (cf[m][t]) {
          level.push_back(*cf[m][t]);
        } else {
          ++excluded_level;
        }
        if (cf[m][t] && actual[m][t]) {
          diff.push_back(*actual[m][t] - *cf[m][t]);
        } else {
          ++excluded_pair;
        }
      }
      path.counterfactual.push_back(summarize_values(std::move(level), excluded_level));
      path.difference.push_back(summarize_values(std::move(diff), excluded_pair));
    }
    report.paths.push_back(std::move(path));
  }
  return report;
}

}  // namespace gb2ss
