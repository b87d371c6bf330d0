#include "gb2ss/mcmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "gb2ss/errors.hpp"
#include "gb2ss/parallel.hpp"
#include "gb2ss/specfun.hpp"

namespace gb2ss {
namespace {

// Stream tags; distinct per purpose so no two calls share a stream.
constexpr std::uint64_t kInitTag = 1;
constexpr std::uint64_t kLatentTag = 2;
constexpr std::uint64_t kGlobalTag = 3;
constexpr std::uint64_t kIndependentTag = 4;

constexpr const char* kParamNames[4] = {"a", "b", "p", "q"};

bool is_stored(std::uint64_t m, const McmcConfig& cfg) {
  return m > cfg.burn_in && (m - cfg.burn_in) % cfg.thin == 0;
}

void notify(const RunHooks& hooks, std::uint64_t m, Step s) {
  if (hooks.on_step) hooks.on_step(m, s);
}

Vec4 starting_point(const GroupedObservation& obs) {
  const auto& y = obs.thresholds();
  const double b = y.empty() ? 1.0 : y[y.size() / 2];
  return Vec4(std::log(2.0), std::log(b), 0.0, 0.0);
}

}  // namespace

void McmcConfig::validate() const {
  if (iterations == 0) throw DataError("mcmc: iterations must be positive");
  if (!(burn_in < iterations)) {
    throw DataError("mcmc: burn_in must be smaller than iterations");
  }
  if (thin < 1) throw DataError("mcmc: thin must be >= 1");
  if (threads < 1) throw DataError("mcmc: threads must be >= 1");
  tarbmh.validate();
}

double log_independent_target(const Vec4& h, const GroupedObservation& obs,
                              double shape, double rate) {
  const double ll = log_grouped_likelihood(LatentState(h), obs);
  if (!std::isfinite(ll)) return kLogZero;
  // Gamma(shape, rate) on theta_i = exp(h_i) plus log|d theta / d h| = h_i.
  const double log_norm = shape * std::log(rate) - ln_gamma(shape);
  double lp = 0.0;
  for (int i = 0; i < 4; ++i) {
    lp += log_norm + shape * h[i] - rate * std::exp(h[i]);
  }
  return ll + lp;
}

Vec4 initial_latent_state(const GroupedObservation& obs, double shape,
                          double rate, const TarbmhConfig& cfg, Rng& rng) {
  const auto f = [&](const VectorXd& h) {
    return log_independent_target(Vec4(h), obs, shape, rate);
  };
  return Vec4(anneal_maximize(f, VectorXd(starting_point(obs)), cfg, rng));
}

Chain run_dynamic(const Dataset& data, const CovariatePanel& covs,
                  const Hyperparameters& hyper, const McmcConfig& cfg,
                  const RunHooks& hooks) {
  data.validate();
  cfg.validate();
  check_dimensions(data, covs);
  const std::size_t T = data.size();
  if (T < 2) throw DataError("run_dynamic: at least two periods required");
  const Eigen::Index d = covs.dim();
  hyper.validate(d);
  const auto start = std::chrono::steady_clock::now();

  Chain chain;
  chain.kind = ModelKind::Dynamic;
  chain.covariate_dim = d;
  chain.labels = data.labels;
  chain.config = cfg;
  chain.acceptance.periods.assign(T, PeriodAcceptance{});
  chain.draws.reserve(cfg.stored_draws());

  std::vector<LatentState> H(T);
  parallel_for(T, cfg.threads, [&](std::size_t t) {
    Rng rng = derive_stream(cfg.seed, {kInitTag, t});
    H[t].h = initial_latent_state(data.periods[t], 1.0, 1.0, cfg.tarbmh, rng);
  });
  Vec4 mu = Vec4::Zero();
  CoefficientPath B(T, VectorXd::Zero(4 * d));
  SymMatrix omega_inv = SymMatrix::identity(4);
  SymMatrix sigma_inv = SymMatrix::identity(4 * d);

  for (std::uint64_t m = 1; m <= cfg.iterations; ++m) {
    try {
      notify(hooks, m, Step::H);
      parallel_for(T, cfg.threads, [&](std::size_t t) {
        Rng rng = derive_stream(cfg.seed, {kLatentTag, m, t});
        const GaussianLogDensity state(mu + design_apply(covs.x(t), B[t]),
                                       omega_inv);
        const GroupedObservation& obs = data.periods[t];
        const LogTarget target = [&](const Vec4& h) {
          const double ll = log_grouped_likelihood(LatentState(h), obs);
          return std::isfinite(ll) ? ll + state(h) : kLogZero;
        };
        H[t].h = tarbmh_sweep(target, H[t].h, cfg.tarbmh, rng,
                              chain.acceptance.periods[t]);
      });

      Rng rng = derive_stream(cfg.seed, {kGlobalTag, m});
      notify(hooks, m, Step::Mu);
      mu = draw_mu(H, B, covs, omega_inv, hyper, rng);
      notify(hooks, m, Step::B);
      B = ffbs(H, mu, inverse_pd(omega_inv, Jitter::RetryOnce),
               inverse_pd(sigma_inv, Jitter::RetryOnce), covs, hyper, rng);
      notify(hooks, m, Step::OmegaInv);
      omega_inv = draw_omega_inv(H, mu, B, covs, hyper, rng);
      notify(hooks, m, Step::SigmaInv);
      sigma_inv = draw_sigma_inv(B, hyper, rng);
    } catch (const SamplerError& e) {
      throw SamplerError("iteration " + std::to_string(m) + ": " + e.what());
    } catch (const NotPositiveDefinite& e) {
      throw SamplerError("iteration " + std::to_string(m) + ": " + e.what());
    }

    if (is_stored(m, cfg)) {
      chain.draws.push_back(ChainDraw{H, mu, B, omega_inv, sigma_inv});
      chain.iterations.push_back(m);
    }
    if (hooks.on_progress && hooks.progress_every > 0 &&
        m % hooks.progress_every == 0) {
      hooks.on_progress(m, chain.acceptance);
    }
  }
  chain.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return chain;
}

Chain run_independent(const Dataset& data, double prior_shape,
                      double prior_rate, const McmcConfig& cfg,
                      const RunHooks& hooks) {
  data.validate();
  cfg.validate();
  if (!(prior_shape > 0.0) || !(prior_rate > 0.0)) {
    throw DataError("run_independent: gamma prior shape and rate must be > 0");
  }
  const std::size_t T = data.size();
  const auto start = std::chrono::steady_clock::now();

  Chain chain;
  chain.kind = ModelKind::Independent;
  chain.covariate_dim = 0;
  chain.labels = data.labels;
  chain.config = cfg;
  chain.prior_shape = prior_shape;
  chain.prior_rate = prior_rate;
  chain.acceptance.periods.assign(T, PeriodAcceptance{});

  const std::uint64_t stored = cfg.stored_draws();
  // [period][stored draw]
  std::vector<std::vector<Vec4>> paths(T);
  parallel_for(T, cfg.threads, [&](std::size_t t) {
    const GroupedObservation& obs = data.periods[t];
    Rng rng = derive_stream(cfg.seed, {kIndependentTag, fnv1a64(data.labels[t])});
    Vec4 h = initial_latent_state(obs, prior_shape, prior_rate, cfg.tarbmh, rng);
    const LogTarget target = [&](const Vec4& v) {
      return log_independent_target(v, obs, prior_shape, prior_rate);
    };
    paths[t].reserve(stored);
    for (std::uint64_t m = 1; m <= cfg.iterations; ++m) {
      h = tarbmh_sweep(target, h, cfg.tarbmh, rng, chain.acceptance.periods[t]);
      if (is_stored(m, cfg)) paths[t].push_back(h);
    }
  });

  chain.draws.resize(stored);
  for (std::uint64_t k = 0; k < stored; ++k) {
    chain.draws[k].H.resize(T);
    for (std::size_t t = 0; t < T; ++t) chain.draws[k].H[t].h = paths[t][k];
    chain.iterations.push_back(cfg.burn_in + (k + 1) * cfg.thin);
  }
  if (hooks.on_progress) hooks.on_progress(cfg.iterations, chain.acceptance);
  chain.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return chain;
}

double percentile_sorted(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw DataError("percentile: empty sample");
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double effective_sample_size(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 4) return static_cast<double>(n);
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  std::vector<double> c(values.size());
  for (std::size_t i = 0; i < n; ++i) c[i] = values[i] - mean;
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += c[i] * c[i + lag];
    return s / static_cast<double>(n);
  };
  const double g0 = autocov(0);
  if (!(g0 > 0.0)) return static_cast<double>(n);
  double tau = -1.0;
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    const double pair = (autocov(lag) + autocov(lag + 1)) / g0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / static_cast<double>(n));
  return static_cast<double>(n) / tau;
}

IntervalSummary summarize_values(std::vector<double> values,
                                 std::size_t excluded) {
  IntervalSummary s;
  s.excluded = excluded;
  s.used = values.size();
  if (values.empty()) {
    s.mean = s.lower = s.upper = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  s.ess = effective_sample_size(values);
  std::sort(values.begin(), values.end());
  s.lower = percentile_sorted(values, 0.025);
  s.upper = percentile_sorted(values, 0.975);
  return s;
}

std::vector<std::vector<std::optional<double>>> gini_draws(
    const std::vector<std::vector<LatentState>>& paths, unsigned threads) {
  std::vector<std::vector<std::optional<double>>> out(paths.size());
  parallel_for(paths.size(), threads, [&](std::size_t m) {
    out[m].resize(paths[m].size());
    for (std::size_t t = 0; t < paths[m].size(); ++t) {
      const auto theta = paths[m][t].theta();
      if (theta) out[m][t] = try_gini(*theta);
    }
  });
  return out;
}

PosteriorSummary summarize(const Chain& chain, Quantity quantity,
                           unsigned threads) {
  if (chain.draws.empty()) throw DataError("summarize: chain has no draws");
  const std::size_t T = chain.periods();
  const std::size_t M = chain.draws.size();
  PosteriorSummary out;
  out.quantity = quantity;
  switch (quantity) {
    case Quantity::Gb2Params:
      for (int i = 0; i < 4; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
          std::vector<double> v(M);
          for (std::size_t m = 0; m < M; ++m) {
            v[m] = std::exp(chain.draws[m].H[t].h[i]);
          }
          out.rows.push_back({chain.labels[t], kParamNames[i],
                              summarize_values(std::move(v))});
        }
      }
      break;
    case Quantity::Coefficients: {
      if (chain.kind != ModelKind::Dynamic) {
        throw DataError("summarize: coefficients exist only for the dynamic model");
      }
      const Eigen::Index d = chain.covariate_dim;
      for (int i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          const std::string comp = std::string(kParamNames[i]) + ":x" +
                                   std::to_string(j + 1);
          for (std::size_t t = 0; t < T; ++t) {
            std::vector<double> v(M);
            for (std::size_t m = 0; m < M; ++m) {
              v[m] = chain.draws[m].B[t][i * d + j];
            }
            out.rows.push_back({chain.labels[t], comp,
                                summarize_values(std::move(v))});
          }
        }
      }
      break;
    }
    case Quantity::Mu:
      if (chain.kind != ModelKind::Dynamic) {
        throw DataError("summarize: mu exists only for the dynamic model");
      }
      for (int i = 0; i < 4; ++i) {
        std::vector<double> v(M);
        for (std::size_t m = 0; m < M; ++m) v[m] = chain.draws[m].mu[i];
        out.rows.push_back({"all", kParamNames[i], summarize_values(std::move(v))});
      }
      break;
    case Quantity::Gini: {
      std::vector<std::vector<LatentState>> paths(M);
      for (std::size_t m = 0; m < M; ++m) paths[m] = chain.draws[m].H;
      const auto g = gini_draws(paths, threads);
      for (std::size_t t = 0; t < T; ++t) {
        std::vector<double> v;
        v.reserve(M);
        std::size_t excluded = 0;
        for (std::size_t m = 0; m < M; ++m) {
          if (g[m][t]) {
            v.push_back(*g[m][t]);
          } else {
            ++excluded;
          }
        }
        out.rows.push_back({chain.labels[t], "gini",
                            summarize_values(std::move(v), excluded)});
      }
      break;
    }
  }
  return out;
}

}  // namespace gb2ss
