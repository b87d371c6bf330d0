#ifndef GB2SS_IO_HPP_
#define GB2SS_IO_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gb2ss/mcmc.hpp"
#include "gb2ss/synth.hpp"

namespace gb2ss::io {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// 17 significant digits; "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double v);

std::string read_text(const fs::path& path);
// Writes via a temporary file in the same directory, then renames.
void write_text(const fs::path& path, const std::string& content);

// Parse with the file name prefixed to any syntax error message.
Json read_json(const fs::path& path);
std::string dump_json(const Json& j);

// Lowercase hex SHA-256 of the file contents.
std::string sha256_file(const fs::path& path);

// ---------------------------------------------------------------------------
// Dataset: {"labels": [T], "thresholds": [T][K-1], "counts": [T][K]}.
// ---------------------------------------------------------------------------
Dataset dataset_from_json(const Json& j);
Json dataset_to_json(const Dataset& data);
Dataset read_dataset(const fs::path& path);
void write_dataset(const fs::path& path, const Dataset& data);

// ---------------------------------------------------------------------------
// Covariates: CSV with a header; first column is the period label, the rest
// are the d series.
// ---------------------------------------------------------------------------
struct CovariateTable {
  std::vector<std::string> names;  // d series names
  std::vector<std::string> labels;
  std::vector<VectorXd> rows;
};

CovariateTable read_covariate_table(const fs::path& path);
// log_diff applies the first difference of the logarithm (T + 1 rows in).
CovariatePanel load_covariates(const fs::path& path, bool log_diff);
void write_covariates(const fs::path& path, const CovariatePanel& covs,
                      const std::vector<std::string>& names = {});

// ---------------------------------------------------------------------------
// Run configuration.
// ---------------------------------------------------------------------------
struct DensityGridConfig {
  int points = 200;
  std::optional<double> upper;  // default: largest posterior-mean 99.5% quantile
};

struct RunConfig {
  McmcConfig mcmc;
  Json hyperparameters = Json::object();  // overrides of the defaults
  double prior_shape = 1.0;
  double prior_rate = 1.0;
  DensityGridConfig density_grid;

  Hyperparameters resolve_hyperparameters(Eigen::Index d) const;
};

// Unknown keys and wrong types raise DataError naming the field.
RunConfig config_from_json(const Json& j);
RunConfig read_config(const fs::path& path);
// Resolved echo. Thread count is omitted because it does not affect results.
Json config_to_json(const RunConfig& cfg);
Json hyperparameters_to_json(const Hyperparameters& h);

// ---------------------------------------------------------------------------
// Synthetic design and truth record.
// ---------------------------------------------------------------------------
SynthSpec synth_spec_from_json(const Json& j);
Json synth_truth_to_json(const SynthTruth& truth);

// ---------------------------------------------------------------------------
// Chain: `path` holds little-endian float64 records, one per stored draw, in
// the order H (T x 4), mu (4), B (T x 4d), Omega^{-1} (4 x 4),
// Sigma^{-1} (4d x 4d), each row-major. Independent chains store H only.
// `path` + ".json" is the sidecar.
// ---------------------------------------------------------------------------
std::size_t record_length(ModelKind kind, std::size_t periods, Eigen::Index d);
fs::path sidecar_path(const fs::path& chain_path);
Json chain_sidecar(const Chain& chain);
void write_chain(const fs::path& path, const Chain& chain);
Chain read_chain(const fs::path& path);

Json acceptance_to_json(const AcceptanceStats& stats,
                        const std::vector<std::string>& labels);

}  // namespace gb2ss::io

#endif  // GB2SS_IO_HPP_
