#include "gb2ss/synth.hpp"

#include <algorithm>
#include <string>

#include "gb2ss/errors.hpp"

namespace gb2ss {
namespace {

constexpr int kFirstYear = 1969;

CoefficientPath beta_path(const ModelTruth& m, std::size_t T, Rng& rng) {
  if (!m.beta.empty()) return m.beta;
  CoefficientPath out;
  out.reserve(T);
  out.push_back(m.beta1);
  const MatrixXd L = cholesky(m.sigma);
  for (std::size_t t = 1; t < T; ++t) {
    out.push_back(sample_mvn_chol(out.back(), L, rng));
  }
  return out;
}

}  // namespace

void SynthSpec::validate() const {
  if (periods < 1) throw DataError("synth: periods must be >= 1");
  if (groups < 1) throw DataError("synth: groups must be >= 1");
  if (n < groups || n % groups != 0) {
    throw DataError("synth: n must be a positive multiple of groups");
  }
  if (!labels.empty() && labels.size() != periods) {
    throw DataError("synth: labels must have one entry per period");
  }
  if (model) {
    const ModelTruth& m = *model;
    const Eigen::Index d = m.covariates.dim();
    if (m.covariates.periods() != periods) {
      throw DimensionError("synth: covariates must have one row per period");
    }
    if (m.omega.dim() != 4) throw DimensionError("synth: omega must be 4 x 4");
    if (m.beta.empty()) {
      if (m.beta1.size() != 4 * d || m.sigma.dim() != 4 * d) {
        throw DimensionError("synth: beta1 and sigma must have dimension 4d");
      }
    } else {
      if (m.beta.size() != periods) {
        throw DimensionError("synth: beta path must have one entry per period");
      }
      for (const auto& b : m.beta) {
        if (b.size() != 4 * d) {
          throw DimensionError("synth: beta entries must have dimension 4d");
        }
      }
    }
  } else if (theta.size() != 1 && theta.size() != periods) {
    throw DataError("synth: theta needs 1 or T entries");
  }
}

std::vector<std::string> SynthSpec::resolved_labels() const {
  if (!labels.empty()) return labels;
  std::vector<std::string> out;
  for (std::size_t t = 0; t < periods; ++t) {
    out.push_back(std::to_string(kFirstYear + static_cast<int>(t)));
  }
  return out;
}

GroupedObservation group_sample(std::vector<double> sample, std::int64_t groups) {
  const auto n = static_cast<std::int64_t>(sample.size());
  if (groups < 1 || n < groups || n % groups != 0) {
    throw DataError("group_sample: sample size must be a multiple of groups");
  }
  std::sort(sample.begin(), sample.end());
  const std::int64_t share = n / groups;
  std::vector<double> thresholds;
  for (std::int64_t k = 1; k < groups; ++k) {
    thresholds.push_back(sample[static_cast<std::size_t>(k * share - 1)]);
  }
  return GroupedObservation(std::move(thresholds),
                            std::vector<std::int64_t>(groups, share));
}

std::pair<Dataset, SynthTruth> generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t T = spec.periods;
  Rng rng = derive_stream(spec.seed, {});

  SynthTruth truth;
  truth.labels = spec.resolved_labels();
  if (spec.model) {
    const ModelTruth& m = *spec.model;
    const CoefficientPath B = beta_path(m, T, rng);
    const MatrixXd L = cholesky(m.omega);
    for (std::size_t t = 0; t < T; ++t) {
      const Vec4 mean = m.mu + design_apply(m.covariates.x(t), B[t]);
      truth.h.push_back(Vec4(sample_mvn_chol(mean, L, rng)));
      const auto theta = LatentState(truth.h.back()).theta();
      if (!theta) {
        throw DomainError("synth: period " + truth.labels[t] +
                          " latent state is out of range");
      }
      truth.theta.push_back(*theta);
    }
    truth.mu = m.mu;
    truth.omega = m.omega;
    truth.beta = B;
  } else {
    for (std::size_t t = 0; t < T; ++t) {
      truth.theta.push_back(spec.theta.size() == 1 ? spec.theta[0] : spec.theta[t]);
      truth.h.push_back(LatentState::from_theta(truth.theta.back()).h);
    }
  }

  Dataset data;
  data.labels = truth.labels;
  for (std::size_t t = 0; t < T; ++t) {
    truth.gini.push_back(try_gini(truth.theta[t]));
    std::vector<double> y(static_cast<std::size_t>(spec.n));
    for (double& v : y) v = sample(truth.theta[t], rng);
    data.periods.push_back(group_sample(std::move(y), spec.groups));
  }
  return {std::move(data), std::move(truth)};
}

}  // namespace gb2ss
