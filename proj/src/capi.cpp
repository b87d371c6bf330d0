#include "gb2ss/gb2ss.h"

#include <cstring>
#include <new>
#include <string>

#include "gb2ss/counterfactual.hpp"
#include "gb2ss/errors.hpp"
#include "gb2ss/io.hpp"
#include "gb2ss/report.hpp"
#include "gb2ss/specfun.hpp"
#include "gb2ss/version.hpp"

struct gb2ss_dataset {
  gb2ss::Dataset data;
};

struct gb2ss_covariates {
  gb2ss::CovariatePanel panel;
};

struct gb2ss_config {
  gb2ss::io::RunConfig cfg;
  std::string json;
};

struct gb2ss_chain {
  gb2ss::Chain chain;
  std::string acceptance_json;
};

namespace {

thread_local std::string g_last_error;

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

gb2ss_status fail(gb2ss_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs fn, mapping exceptions onto status codes. Order matters: the more
// specific types derive from the generic ones.
template <class F>
gb2ss_status guard(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return GB2SS_OK;
  } catch (const ArgumentError& e) {
    return fail(GB2SS_E_ARGUMENT, e.what());
  } catch (const gb2ss::IoError& e) {
    return fail(GB2SS_E_IO, e.what());
  } catch (const gb2ss::DataError& e) {
    return fail(GB2SS_E_DATA, e.what());
  } catch (const gb2ss::MomentError& e) {
    return fail(GB2SS_E_DOMAIN, e.what());
  } catch (const gb2ss::DomainError& e) {
    return fail(GB2SS_E_DOMAIN, e.what());
  } catch (const gb2ss::NotPositiveDefinite& e) {
    return fail(GB2SS_E_NUMERICAL, e.what());
  } catch (const gb2ss::SamplerError& e) {
    return fail(GB2SS_E_NUMERICAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(GB2SS_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GB2SS_E_INTERNAL, e.what());
  } catch (...) {
    return fail(GB2SS_E_INTERNAL, "unknown error");
  }
}

template <class T>
const T& need(const T* p, const char* name) {
  if (p == nullptr) throw ArgumentError(std::string(name) + " is null");
  return *p;
}

template <class T>
T& need(T* p, const char* name) {
  if (p == nullptr) throw ArgumentError(std::string(name) + " is null");
  return *p;
}

const char* need_path(const char* p, const char* name) {
  if (p == nullptr || *p == '\0') throw ArgumentError(std::string(name) + " is empty");
  return p;
}

gb2ss::Gb2Params params(double a, double b, double p, double q) {
  return gb2ss::Gb2Params(a, b, p, q);
}

gb2ss::RunHooks progress_hooks(gb2ss_progress_fn fn, void* user, std::uint64_t total) {
  gb2ss::RunHooks hooks;
  if (fn != nullptr) {
    hooks.on_progress = [fn, user, total](std::uint64_t m,
                                          const gb2ss::AcceptanceStats& s) {
      fn(m, total, s.overall_rate(), user);
    };
  }
  return hooks;
}

}  // namespace

extern "C" {

const char* gb2ss_version(void) { return gb2ss::kVersion; }

const char* gb2ss_last_error(void) { return g_last_error.c_str(); }

const char* gb2ss_status_name(gb2ss_status status) {
  switch (status) {
    case GB2SS_OK: return "ok";
    case GB2SS_E_ARGUMENT: return "invalid argument";
    case GB2SS_E_DATA: return "data error";
    case GB2SS_E_IO: return "i/o error";
    case GB2SS_E_DOMAIN: return "domain error";
    case GB2SS_E_NUMERICAL: return "numerical failure";
    case GB2SS_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

gb2ss_status gb2ss_gb2_pdf(double a, double b, double p, double q, double x,
                           double* out) {
  return guard([&] { need(out, "out") = gb2ss::pdf(params(a, b, p, q), x); });
}

gb2ss_status gb2ss_gb2_cdf(double a, double b, double p, double q, double x,
                           double* out) {
  return guard([&] { need(out, "out") = gb2ss::cdf(params(a, b, p, q), x); });
}

gb2ss_status gb2ss_gb2_quantile(double a, double b, double p, double q, double u,
                                double* out) {
  return guard([&] { need(out, "out") = gb2ss::quantile(params(a, b, p, q), u); });
}

gb2ss_status gb2ss_gb2_gini(double a, double b, double p, double q, double* out) {
  return guard([&] { need(out, "out") = gb2ss::gini(params(a, b, p, q)); });
}

gb2ss_status gb2ss_reg_inc_beta(double z, double p, double q, double* out) {
  return guard([&] { need(out, "out") = gb2ss::reg_inc_beta(z, p, q); });
}

gb2ss_status gb2ss_dataset_load(const char* path, gb2ss_dataset** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    *out = new gb2ss_dataset{gb2ss::io::read_dataset(need_path(path, "path"))};
  });
}

gb2ss_status gb2ss_dataset_save(const gb2ss_dataset* data, const char* path) {
  return guard([&] {
    gb2ss::io::write_dataset(need_path(path, "path"), need(data, "data").data);
  });
}

size_t gb2ss_dataset_periods(const gb2ss_dataset* data) {
  return data == nullptr ? 0 : data->data.size();
}

void gb2ss_dataset_free(gb2ss_dataset* data) { delete data; }

gb2ss_status gb2ss_covariates_load(const char* path, int log_diff,
                                   gb2ss_covariates** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    *out = new gb2ss_covariates{
        gb2ss::io::load_covariates(need_path(path, "path"), log_diff != 0)};
  });
}

size_t gb2ss_covariates_dim(const gb2ss_covariates* covs) {
  return covs == nullptr ? 0 : static_cast<size_t>(covs->panel.dim());
}

void gb2ss_covariates_free(gb2ss_covariates* covs) { delete covs; }

gb2ss_status gb2ss_config_load(const char* path, gb2ss_config** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    auto cfg = path == nullptr ? gb2ss::io::RunConfig{} : gb2ss::io::read_config(path);
    *out = new gb2ss_config{std::move(cfg), {}};
  });
}

gb2ss_status gb2ss_config_set_seed(gb2ss_config* cfg, uint64_t seed) {
  return guard([&] { need(cfg, "cfg").cfg.mcmc.seed = seed; });
}

gb2ss_status gb2ss_config_set_threads(gb2ss_config* cfg, unsigned threads) {
  return guard([&] {
    if (threads == 0) throw ArgumentError("threads must be >= 1");
    need(cfg, "cfg").cfg.mcmc.threads = threads;
  });
}

unsigned gb2ss_config_threads(const gb2ss_config* cfg) {
  return cfg == nullptr ? 1 : cfg->cfg.mcmc.threads;
}

const char* gb2ss_config_json(gb2ss_config* cfg) {
  if (cfg == nullptr) return "";
  cfg->json = gb2ss::io::dump_json(gb2ss::io::config_to_json(cfg->cfg));
  return cfg->json.c_str();
}

void gb2ss_config_free(gb2ss_config* cfg) { delete cfg; }

gb2ss_status gb2ss_fit_dynamic(const gb2ss_dataset* data, const gb2ss_covariates* covs,
                               const gb2ss_config* cfg, gb2ss_progress_fn progress,
                               void* user, gb2ss_chain** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    const auto& c = need(cfg, "cfg").cfg;
    const auto& panel = need(covs, "covs").panel;
    const auto hyper = c.resolve_hyperparameters(panel.dim());
    auto chain = gb2ss::run_dynamic(need(data, "data").data, panel, hyper, c.mcmc,
                                    progress_hooks(progress, user, c.mcmc.iterations));
    *out = new gb2ss_chain{std::move(chain), {}};
  });
}

gb2ss_status gb2ss_fit_independent(const gb2ss_dataset* data, const gb2ss_config* cfg,
                                   gb2ss_progress_fn progress, void* user,
                                   gb2ss_chain** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    const auto& c = need(cfg, "cfg").cfg;
    auto chain = gb2ss::run_independent(need(data, "data").data, c.prior_shape,
                                        c.prior_rate, c.mcmc,
                                        progress_hooks(progress, user, c.mcmc.iterations));
    *out = new gb2ss_chain{std::move(chain), {}};
  });
}

gb2ss_status gb2ss_chain_save(const gb2ss_chain* chain, const char* path) {
  return guard([&] {
    gb2ss::io::write_chain(need_path(path, "path"), need(chain, "chain").chain);
  });
}

gb2ss_status gb2ss_chain_load(const char* path, gb2ss_chain** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    *out = new gb2ss_chain{gb2ss::io::read_chain(need_path(path, "path")), {}};
  });
}

size_t gb2ss_chain_draws(const gb2ss_chain* chain) {
  return chain == nullptr ? 0 : chain->chain.draws.size();
}

size_t gb2ss_chain_periods(const gb2ss_chain* chain) {
  return chain == nullptr ? 0 : chain->chain.periods();
}

double gb2ss_chain_acceptance(const gb2ss_chain* chain) {
  return chain == nullptr ? 0.0 : chain->chain.acceptance.overall_rate();
}

double gb2ss_chain_wall_seconds(const gb2ss_chain* chain) {
  return chain == nullptr ? 0.0 : chain->chain.wall_seconds;
}

const char* gb2ss_chain_acceptance_json(gb2ss_chain* chain) {
  if (chain == nullptr) return "";
  chain->acceptance_json = gb2ss::io::acceptance_to_json(chain->chain.acceptance,
                                                         chain->chain.labels)
                               .dump();
  return chain->acceptance_json.c_str();
}

void gb2ss_chain_free(gb2ss_chain* chain) { delete chain; }

gb2ss_status gb2ss_summarize_write(const gb2ss_chain* chain, const char* selector,
                                   const char* csv_path, unsigned threads) {
  return guard([&] {
    const auto q = gb2ss::report::parse_selector(need_path(selector, "selector"));
    const auto s = gb2ss::summarize(need(chain, "chain").chain, q, threads);
    gb2ss::io::write_text(need_path(csv_path, "csv_path"), gb2ss::report::summary_csv(s));
  });
}

gb2ss_status gb2ss_density_grid_write(const gb2ss_chain* chain, int points, double upper,
                                      const char* csv_path, unsigned threads) {
  return guard([&] {
    const auto& c = need(chain, "chain").chain;
    std::optional<double> hi;
    if (upper > 0.0) hi = upper;
    const auto grid = gb2ss::report::density_grid(c, points, hi, threads);
    gb2ss::io::write_text(need_path(csv_path, "csv_path"),
                          gb2ss::report::density_csv(c.labels, grid));
  });
}

gb2ss_status gb2ss_counterfactual_write(const gb2ss_chain* chain,
                                        const gb2ss_covariates* covs, int index,
                                        const char* actual_path,
                                        const char* counterfactual_path,
                                        const char* difference_path, unsigned threads) {
  return guard([&] {
    const auto& c = need(chain, "chain").chain;
    const gb2ss::CounterfactualSpec spec{index, "x" + std::to_string(index)};
    const auto report = gb2ss::gini_paths(c, {spec}, need(covs, "covs").panel, threads);
    const auto& path = report.paths.front();
    using gb2ss::report::interval_csv;
    gb2ss::io::write_text(need_path(actual_path, "actual_path"),
                          interval_csv(report.periods, report.actual));
    gb2ss::io::write_text(need_path(counterfactual_path, "counterfactual_path"),
                          interval_csv(report.periods, path.counterfactual));
    gb2ss::io::write_text(need_path(difference_path, "difference_path"),
                          interval_csv(report.periods, path.difference));
  });
}

gb2ss_status gb2ss_sweep_write(const char* spec_path, const char* table_path,
                               const char* pdf_path) {
  return guard([&] {
    const auto spec = spec_path == nullptr
                          ? gb2ss::report::default_sweep()
                          : gb2ss::report::sweep_from_json(gb2ss::io::read_json(spec_path));
    const auto rows = gb2ss::report::run_sweep(spec);
    gb2ss::io::write_text(need_path(table_path, "table_path"),
                          gb2ss::report::sweep_csv(rows));
    if (pdf_path != nullptr) {
      gb2ss::io::write_text(pdf_path, gb2ss::report::sweep_pdf_csv(spec, rows));
    }
  });
}

gb2ss_status gb2ss_simulate(const char* spec_path, int has_seed, uint64_t seed_override,
                            const char* dataset_path, const char* truth_path,
                            const char* covariates_path, int* covariates_written) {
  return guard([&] {
    if (covariates_written != nullptr) *covariates_written = 0;
    gb2ss::SynthSpec spec;
    if (spec_path != nullptr) {
      try {
        spec = gb2ss::io::synth_spec_from_json(gb2ss::io::read_json(spec_path));
      } catch (const gb2ss::DataError& e) {
        const std::string msg = e.what();
        if (msg.starts_with(spec_path)) throw;
        throw gb2ss::DataError(std::string(spec_path) + ": " + msg);
      }
    }
    if (has_seed != 0) spec.seed = seed_override;
    const auto [data, truth] = gb2ss::generate(spec);
    gb2ss::io::write_dataset(need_path(dataset_path, "dataset_path"), data);
    gb2ss::io::write_text(need_path(truth_path, "truth_path"),
                          gb2ss::io::dump_json(gb2ss::io::synth_truth_to_json(truth)));
    if (spec.model && covariates_path != nullptr) {
      gb2ss::io::write_covariates(covariates_path, spec.model->covariates);
      if (covariates_written != nullptr) *covariates_written = 1;
    }
  });
}

gb2ss_status gb2ss_file_sha256(const char* path, char* out, size_t out_size) {
  return guard([&] {
    if (out == nullptr || out_size < 65) throw ArgumentError("out needs 65 bytes");
    const std::string hex = gb2ss::io::sha256_file(need_path(path, "path"));
    std::memcpy(out, hex.c_str(), hex.size() + 1);
  });
}

}  // extern "C"
