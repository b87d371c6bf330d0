#ifndef GB2SS_MCMC_HPP_
#define GB2SS_MCMC_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gb2ss/model.hpp"
#include "gb2ss/samplers.hpp"

namespace gb2ss {

struct McmcConfig {
  std::uint64_t iterations = 200000;
  std::uint64_t burn_in = 50000;
  std::uint64_t thin = 10;
  std::uint64_t seed = 20240601;
  TarbmhConfig tarbmh;
  unsigned threads = 1;  // max periods updated in parallel

  void validate() const;
  std::uint64_t stored_draws() const { return (iterations - burn_in) / thin; }
};

enum class ModelKind { Dynamic, Independent };

struct Chain {
  ModelKind kind = ModelKind::Dynamic;
  Eigen::Index covariate_dim = 0;  // d; 0 for the independent model
  std::vector<std::string> labels;
  std::vector<ChainDraw> draws;             // independent: only H is filled
  std::vector<std::uint64_t> iterations;    // sweep index of each stored draw
  AcceptanceStats acceptance;
  McmcConfig config;
  double prior_shape = 1.0;  // independent model gamma prior
  double prior_rate = 1.0;
  double wall_seconds = 0.0;

  std::size_t periods() const { return labels.size(); }
};

// Order of the updates within one sweep; reported to RunHooks::on_step.
enum class Step { H, Mu, B, OmegaInv, SigmaInv };

struct RunHooks {
  std::function<void(std::uint64_t iteration, Step step)> on_step;
  // Called every `progress_every` sweeps.
  std::function<void(std::uint64_t iteration, const AcceptanceStats&)> on_progress;
  std::uint64_t progress_every = 1000;
};

// Independent-model log target in h-space for one period: grouped
// likelihood + Gamma(shape, rate) log prior on each exp(h_i) + log Jacobian.
double log_independent_target(const Vec4& h, const GroupedObservation& obs,
                              double shape, double rate);

// Per-period annealed mode of the independent-model target; the starting
// value for both samplers.
Vec4 initial_latent_state(const GroupedObservation& obs, double shape,
                          double rate, const TarbmhConfig& cfg, Rng& rng);

// Gibbs loop: H -> mu -> B -> Omega^{-1} -> Sigma^{-1}.
Chain run_dynamic(const Dataset& data, const CovariatePanel& covs,
                  const Hyperparameters& hyper, const McmcConfig& cfg,
                  const RunHooks& hooks = {});

// Independent per-period TaRBMH chains with gamma priors on theta_t.
// Each period's stream is keyed on its label, so a period's draws do not
// depend on which other periods are fitted alongside it.
Chain run_independent(const Dataset& data, double prior_shape,
                      double prior_rate, const McmcConfig& cfg,
                      const RunHooks& hooks = {});

// ----------------------------------------------------------------------------
// Posterior summaries.
// ----------------------------------------------------------------------------

enum class Quantity { Gb2Params, Coefficients, Mu, Gini };

struct IntervalSummary {
  double mean = 0.0;
  double lower = 0.0;  // 2.5% percentile
  double upper = 0.0;  // 97.5% percentile
  std::size_t used = 0;
  std::size_t excluded = 0;
  double ess = 0.0;
};

struct SummaryRow {
  std::string period;     // period label, or "all" for mu
  std::string component;  // a/b/p/q, "a:x1", or "gini"
  IntervalSummary stats;
};

struct PosteriorSummary {
  Quantity quantity = Quantity::Gini;
  std::vector<SummaryRow> rows;
};

// Linear-interpolation percentile on sorted data, position prob * (n - 1).
double percentile_sorted(const std::vector<double>& sorted, double prob);

// Crude ESS from the initial positive sequence of autocorrelation pairs.
double effective_sample_size(const std::vector<double>& values);

IntervalSummary summarize_values(std::vector<double> values,
                                 std::size_t excluded = 0);

// Gini per draw and period; nullopt where a*q <= 1. [draw][period].
std::vector<std::vector<std::optional<double>>> gini_draws(
    const std::vector<std::vector<LatentState>>& paths, unsigned threads = 1);

PosteriorSummary summarize(const Chain& chain, Quantity quantity,
                           unsigned threads = 1);

}  // namespace gb2ss

#endif  // GB2SS_MCMC_HPP_
