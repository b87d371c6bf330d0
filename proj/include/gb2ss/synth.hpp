#ifndef GB2SS_SYNTH_HPP_
#define GB2SS_SYNTH_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gb2ss/model.hpp"

namespace gb2ss {

// Latent-path generator: h_t = mu + Z_t beta_t + eps_t, eps_t ~ N(0, omega).
// When `beta` is empty the path is a random walk started at beta1 with
// N(0, sigma) increments.
struct ModelTruth {
  Vec4 mu = Vec4::Zero();
  SymMatrix omega;
  CovariatePanel covariates{{VectorXd::Zero(1)}};
  CoefficientPath beta;
  VectorXd beta1;
  SymMatrix sigma;
};

struct SynthSpec {
  std::size_t periods = 39;
  std::int64_t n = 10000;
  std::int64_t groups = 5;
  // Either one parameter set per period (a single entry is broadcast) or a
  // model-based latent path.
  std::vector<Gb2Params> theta{Gb2Params(3.0, 3.0, 3.0, 3.0)};
  std::optional<ModelTruth> model;
  std::vector<std::string> labels;  // default "1969", "1970", ...
  std::uint64_t seed = 20240601;

  void validate() const;
  std::vector<std::string> resolved_labels() const;
};

struct SynthTruth {
  std::vector<std::string> labels;
  std::vector<Gb2Params> theta;  // per period
  std::vector<Vec4> h;
  std::vector<std::optional<double>> gini;  // nullopt where a*q <= 1
  // Model-based generation only.
  std::optional<Vec4> mu;
  std::optional<SymMatrix> omega;
  std::optional<CoefficientPath> beta;
};

// Grouped observation from a raw sample: thresholds are the (k n / K)-th
// order statistics, counts n / K each.
GroupedObservation group_sample(std::vector<double> sample, std::int64_t groups);

std::pair<Dataset, SynthTruth> generate(const SynthSpec& spec);

}  // namespace gb2ss

#endif  // GB2SS_SYNTH_HPP_
