// Command-line front end. Talks to the engine only through the C API.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gb2ss/gb2ss.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct Failure {
  int code;
  std::string message;
};

int exit_code(gb2ss_status s) {
  switch (s) {
    case GB2SS_OK: return kExitOk;
    case GB2SS_E_ARGUMENT: return kExitUsage;
    case GB2SS_E_DATA:
    case GB2SS_E_IO: return kExitData;
    default: return kExitNumerical;
  }
}

void check(gb2ss_status s) {
  if (s != GB2SS_OK) throw Failure{exit_code(s), gb2ss_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using DatasetPtr = std::unique_ptr<gb2ss_dataset, Deleter<gb2ss_dataset, gb2ss_dataset_free>>;
using CovariatesPtr =
    std::unique_ptr<gb2ss_covariates, Deleter<gb2ss_covariates, gb2ss_covariates_free>>;
using ConfigPtr = std::unique_ptr<gb2ss_config, Deleter<gb2ss_config, gb2ss_config_free>>;
using ChainPtr = std::unique_ptr<gb2ss_chain, Deleter<gb2ss_chain, gb2ss_chain_free>>;

std::string digest(const fs::path& p) {
  char hex[65];
  check(gb2ss_file_sha256(p.string().c_str(), hex, sizeof hex));
  return hex;
}

std::string absolute(const std::string& p) {
  return p.empty() ? p : fs::absolute(p).lexically_normal().string();
}

// Options shared by all commands; paths are made absolute after parsing so
// that a manifest replays from any working directory.
struct Options {
  std::string command;
  std::string dataset, covariates, config, chain, spec, manifest;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::vector<int> zero;
  bool log_diff = false;
  std::string select = "gini";
  std::optional<int> grid_points;
  std::optional<double> grid_max;
  std::string out_dir = ".";
  bool quiet = false;
};

// Argument vector reproducing `o`, excluding --out-dir.
std::vector<std::string> canonical_args(const Options& o) {
  std::vector<std::string> a{o.command};
  auto add = [&](const std::string& flag, const std::string& v) {
    if (!v.empty()) {
      a.push_back(flag);
      a.push_back(v);
    }
  };
  if (o.command == "fit" || o.command == "fit-independent") add("--dataset", o.dataset);
  add("--covariates", o.covariates);
  add("--config", o.config);
  add("--chain", o.chain);
  add("--spec", o.spec);
  if (o.seed) add("--seed", std::to_string(*o.seed));
  if (o.threads) add("--threads", std::to_string(*o.threads));
  for (int z : o.zero) add("--zero", std::to_string(z));
  if (o.log_diff) a.push_back("--log-diff");
  if (o.command == "summarize") add("--select", o.select);
  if (o.grid_points) add("--grid-points", std::to_string(*o.grid_points));
  if (o.grid_max) {
    std::ostringstream s;
    s.precision(17);
    s << *o.grid_max;
    add("--grid-max", s.str());
  }
  return a;
}

class Manifest {
 public:
  explicit Manifest(const Options& o) : out_dir_(o.out_dir) {
    j_["engine"] = "gb2ss";
    j_["version"] = gb2ss_version();
    j_["command"] = o.command;
    j_["args"] = canonical_args(o);
    j_["inputs"] = Json::object();
    j_["outputs"] = Json::object();
  }

  void input(const std::string& path) {
    if (!path.empty()) j_["inputs"][path] = digest(path);
  }
  void output(const std::string& name) {
    j_["outputs"][name] = digest(out_dir_ / name);
  }
  Json& operator[](const char* key) { return j_[key]; }

  void write(double wall_seconds) {
    j_["wall_seconds"] = wall_seconds;
    const fs::path p = out_dir_ / "manifest.json";
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << j_.dump(2) << "\n";
    if (!out) throw Failure{kExitData, "cannot write " + p.string()};
  }

 private:
  fs::path out_dir_;
  Json j_;
};

std::string out_path(const Options& o, const std::string& name) {
  return (fs::path(o.out_dir) / name).string();
}

ConfigPtr load_config(const Options& o) {
  gb2ss_config* raw = nullptr;
  check(gb2ss_config_load(o.config.empty() ? nullptr : o.config.c_str(), &raw));
  ConfigPtr cfg(raw);
  if (o.seed) check(gb2ss_config_set_seed(cfg.get(), *o.seed));
  if (o.threads) check(gb2ss_config_set_threads(cfg.get(), *o.threads));
  return cfg;
}

void progress(std::uint64_t m, std::uint64_t total, double rate, void* user) {
  if (*static_cast<bool*>(user)) return;
  std::fprintf(stderr, "iteration %llu/%llu  acceptance %.3f\n",
               static_cast<unsigned long long>(m),
               static_cast<unsigned long long>(total), rate);
}

Json parse_json(const char* text) { return Json::parse(text); }

void cmd_simulate(const Options& o, Manifest& man) {
  man.input(o.spec);
  int wrote_covs = 0;
  check(gb2ss_simulate(o.spec.empty() ? nullptr : o.spec.c_str(), o.seed ? 1 : 0,
                       o.seed.value_or(0), out_path(o, "dataset.json").c_str(),
                       out_path(o, "truth.json").c_str(),
                       out_path(o, "covariates.csv").c_str(), &wrote_covs));
  man.output("dataset.json");
  man.output("truth.json");
  if (wrote_covs) man.output("covariates.csv");
  gb2ss_dataset* raw = nullptr;
  check(gb2ss_dataset_load(out_path(o, "dataset.json").c_str(), &raw));
  DatasetPtr data(raw);
  std::printf("simulated %zu periods -> %s\n", gb2ss_dataset_periods(data.get()),
              out_path(o, "dataset.json").c_str());
}

void finish_fit(const Options& o, Manifest& man, gb2ss_config* cfg, ChainPtr chain) {
  check(gb2ss_chain_save(chain.get(), out_path(o, "chain.bin").c_str()));
  man.output("chain.bin");
  man.output("chain.bin.json");
  man["seed"] = parse_json(gb2ss_config_json(cfg))["seed"];
  man["threads"] = gb2ss_config_threads(cfg);
  man["config"] = parse_json(gb2ss_config_json(cfg));
  man["acceptance"] = parse_json(gb2ss_chain_acceptance_json(chain.get()));
  std::printf("stored %zu draws; overall acceptance %.4f -> %s\n",
              gb2ss_chain_draws(chain.get()), gb2ss_chain_acceptance(chain.get()),
              out_path(o, "chain.bin").c_str());
}

void cmd_fit(const Options& o, Manifest& man) {
  man.input(o.dataset);
  man.input(o.covariates);
  man.input(o.config);
  gb2ss_dataset* d = nullptr;
  check(gb2ss_dataset_load(o.dataset.c_str(), &d));
  DatasetPtr data(d);
  gb2ss_covariates* c = nullptr;
  check(gb2ss_covariates_load(o.covariates.c_str(), o.log_diff ? 1 : 0, &c));
  CovariatesPtr covs(c);
  ConfigPtr cfg = load_config(o);
  bool quiet = o.quiet;
  gb2ss_chain* ch = nullptr;
  check(gb2ss_fit_dynamic(data.get(), covs.get(), cfg.get(), progress, &quiet, &ch));
  finish_fit(o, man, cfg.get(), ChainPtr(ch));
}

void cmd_fit_independent(const Options& o, Manifest& man) {
  man.input(o.dataset);
  man.input(o.config);
  gb2ss_dataset* d = nullptr;
  check(gb2ss_dataset_load(o.dataset.c_str(), &d));
  DatasetPtr data(d);
  ConfigPtr cfg = load_config(o);
  bool quiet = o.quiet;
  gb2ss_chain* ch = nullptr;
  check(gb2ss_fit_independent(data.get(), cfg.get(), progress, &quiet, &ch));
  finish_fit(o, man, cfg.get(), ChainPtr(ch));
}

ChainPtr load_chain(const Options& o, Manifest& man) {
  man.input(o.chain);
  man.input(o.chain + ".json");
  gb2ss_chain* ch = nullptr;
  check(gb2ss_chain_load(o.chain.c_str(), &ch));
  return ChainPtr(ch);
}

unsigned threads(const Options& o) { return o.threads.value_or(1); }

void cmd_counterfactual(const Options& o, Manifest& man) {
  ChainPtr chain = load_chain(o, man);
  man.input(o.covariates);
  gb2ss_covariates* c = nullptr;
  check(gb2ss_covariates_load(o.covariates.c_str(), o.log_diff ? 1 : 0, &c));
  CovariatesPtr covs(c);
  for (int z : o.zero) {
    const std::string tag = "x" + std::to_string(z);
    const std::string cf = "counterfactual_" + tag + "_gini.csv";
    const std::string diff = "counterfactual_" + tag + "_difference.csv";
    check(gb2ss_counterfactual_write(chain.get(), covs.get(), z,
                                     out_path(o, "gini_actual.csv").c_str(),
                                     out_path(o, cf).c_str(), out_path(o, diff).c_str(),
                                     threads(o)));
    man.output(cf);
    man.output(diff);
    std::printf("zeroed covariate %d -> %s, %s\n", z, cf.c_str(), diff.c_str());
  }
  man.output("gini_actual.csv");
}

void cmd_summarize(const Options& o, Manifest& man) {
  ChainPtr chain = load_chain(o, man);
  const std::string summary = "summary_" + o.select + ".csv";
  check(gb2ss_summarize_write(chain.get(), o.select.c_str(), out_path(o, summary).c_str(),
                              threads(o)));
  man.output(summary);
  check(gb2ss_density_grid_write(chain.get(), o.grid_points.value_or(200),
                                 o.grid_max.value_or(0.0),
                                 out_path(o, "density_grid.csv").c_str(), threads(o)));
  man.output("density_grid.csv");
  std::printf("wrote %s and density_grid.csv\n", summary.c_str());
}

void cmd_sweep(const Options& o, Manifest& man) {
  man.input(o.spec);
  check(gb2ss_sweep_write(o.spec.empty() ? nullptr : o.spec.c_str(),
                          out_path(o, "sweep.csv").c_str(),
                          out_path(o, "sweep_pdf.csv").c_str()));
  man.output("sweep.csv");
  man.output("sweep_pdf.csv");
  std::printf("wrote sweep.csv and sweep_pdf.csv\n");
}

int run(std::vector<std::string> argv);

// Re-run the recorded command into a fresh directory and compare digests.
int cmd_replay(const Options& o) {
  std::ifstream in(o.manifest, std::ios::binary);
  if (!in) throw Failure{kExitData, "cannot open " + o.manifest};
  Json man;
  try {
    man = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Failure{kExitData, o.manifest + ": " + e.what()};
  }
  for (const auto& [path, sha] : man.at("inputs").items()) {
    if (!fs::exists(path) || digest(path) != sha.get<std::string>()) {
      throw Failure{kExitData, "input changed since the recorded run: " + path};
    }
  }
  std::vector<std::string> args{"gb2ss"};
  std::optional<std::string> threads_override;
  if (o.threads) threads_override = std::to_string(*o.threads);
  const auto recorded = man.at("args").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < recorded.size(); ++i) {
    if (threads_override && recorded[i] == "--threads" && i + 1 < recorded.size()) {
      ++i;
      continue;
    }
    args.push_back(recorded[i]);
  }
  if (threads_override) {
    args.push_back("--threads");
    args.push_back(*threads_override);
  }
  const std::string dir =
      o.out_dir == "." ? (fs::path(o.manifest).parent_path() / "replay").string() : o.out_dir;
  args.push_back("--out-dir");
  args.push_back(dir);
  args.push_back("--quiet");
  const int rc = run(args);
  if (rc != kExitOk) return rc;

  bool identical = true;
  Json report;
  report["manifest"] = o.manifest;
  report["out_dir"] = dir;
  for (const auto& [name, sha] : man.at("outputs").items()) {
    const std::string now = digest(fs::path(dir) / name);
    const bool same = now == sha.get<std::string>();
    identical = identical && same;
    report["outputs"][name] = same ? "identical" : "different";
    std::printf("%-36s %s\n", name.c_str(), same ? "identical" : "DIFFERENT");
  }
  report["identical"] = identical;
  std::ofstream(fs::path(dir) / "replay.json", std::ios::binary) << report.dump(2) << "\n";
  return identical ? kExitOk : kExitNumerical;
}

int run(std::vector<std::string> argv) {
  CLI::App app{"Bayesian state-space GB2 income-distribution engine"};
  app.set_version_flag("--version", std::string(gb2ss_version()));
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--out-dir", o.out_dir, "Output directory (created if missing)");
    c->add_flag("--quiet", o.quiet, "Suppress progress output");
  };
  auto seeded = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Override the seed");
  };
  auto threaded = [&](CLI::App* c) {
    c->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic grouped dataset");
  sim->add_option("spec,--spec", o.spec, "Synthetic design (JSON)")->check(CLI::ExistingFile);
  seeded(sim);
  common(sim);

  auto* fit = app.add_subcommand("fit", "Fit the dynamic state-space model");
  fit->add_option("dataset,--dataset", o.dataset, "Dataset (JSON)")
      ->required()->check(CLI::ExistingFile);
  fit->add_option("covariates,--covariates", o.covariates, "Covariates (CSV)")
      ->required()->check(CLI::ExistingFile);
  fit->add_option("--config", o.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  fit->add_flag("--log-diff", o.log_diff, "First difference of the log of the covariates");
  seeded(fit);
  threaded(fit);
  common(fit);

  auto* ind = app.add_subcommand("fit-independent", "Fit independent per-period models");
  ind->add_option("dataset,--dataset", o.dataset, "Dataset (JSON)")
      ->required()->check(CLI::ExistingFile);
  ind->add_option("--config", o.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  seeded(ind);
  threaded(ind);
  common(ind);

  auto* cf = app.add_subcommand("counterfactual", "Gini paths with a covariate removed");
  cf->add_option("chain,--chain", o.chain, "Chain file")->required()->check(CLI::ExistingFile);
  cf->add_option("covariates,--covariates", o.covariates, "Covariates (CSV)")
      ->required()->check(CLI::ExistingFile);
  cf->add_option("--zero", o.zero, "Covariate index to zero (1-based, repeatable)")
      ->required()->check(CLI::PositiveNumber);
  cf->add_flag("--log-diff", o.log_diff, "First difference of the log of the covariates");
  threaded(cf);
  common(cf);

  auto* sum = app.add_subcommand("summarize", "Posterior summary table and density grid");
  sum->add_option("chain,--chain", o.chain, "Chain file")->required()->check(CLI::ExistingFile);
  sum->add_option("--select", o.select, "gb2-params | coefficients | mu | gini")
      ->check(CLI::IsMember({"gb2-params", "coefficients", "mu", "gini"}));
  sum->add_option("--grid-points", o.grid_points, "Density grid points")
      ->check(CLI::Range(2, 100000));
  sum->add_option("--grid-max", o.grid_max, "Upper end of the density grid")
      ->check(CLI::PositiveNumber);
  threaded(sum);
  common(sum);

  auto* sw = app.add_subcommand("sweep", "Gini over a one-parameter-at-a-time grid");
  sw->add_option("spec,--spec", o.spec, "Sweep grid (JSON)")->check(CLI::ExistingFile);
  common(sw);

  auto* rep = app.add_subcommand("replay", "Re-run a command from its manifest");
  rep->add_option("manifest", o.manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  threaded(rep);
  common(rep);

  std::vector<const char*> cargs;
  for (const auto& a : argv) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), const_cast<char**>(cargs.data()));
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  o.command = sub->get_name();
  if (o.command == "replay") return cmd_replay(o);

  o.dataset = absolute(o.dataset);
  o.covariates = absolute(o.covariates);
  o.config = absolute(o.config);
  o.chain = absolute(o.chain);
  o.spec = absolute(o.spec);
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw Failure{kExitData, "cannot create " + o.out_dir + ": " + ec.message()};

  const auto start = std::chrono::steady_clock::now();
  Manifest man(o);
  if (o.command == "simulate") cmd_simulate(o, man);
  else if (o.command == "fit") cmd_fit(o, man);
  else if (o.command == "fit-independent") cmd_fit_independent(o, man);
  else if (o.command == "counterfactual") cmd_counterfactual(o, man);
  else if (o.command == "summarize") cmd_summarize(o, man);
  else if (o.command == "sweep") cmd_sweep(o, man);
  man.write(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(std::vector<std::string>(argv, argv + argc));
  } catch (const Failure& f) {
    std::fprintf(stderr, "gb2ss: %s\n", f.message.c_str());
    return f.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gb2ss: %s\n", e.what());
    return kExitNumerical;
  }
}
