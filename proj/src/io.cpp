#include "gb2ss/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "gb2ss/errors.hpp"

namespace gb2ss::io {
namespace {

constexpr const char* kChainFormat = "gb2ss-chain";
constexpr int kChainVersion = 1;
constexpr const char* kBlockNames[6] = {"a-b", "a-p", "a-q", "b-p", "b-q", "p-q"};

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw DataError("field '" + field + "': " + what);
}

void check_keys(const Json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) field_error(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.contains(key)) {
      field_error(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

std::string join(const std::string& where, const char* key) {
  return where.empty() ? std::string(key) : where + "." + key;
}

double get_number(const Json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

std::uint64_t get_count(const Json& j, const std::string& field) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  field_error(field, "expected a non-negative integer");
}

int get_int(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) field_error(field, "expected an integer");
  return j.get<int>();
}

std::string get_label(const Json& j, const std::string& field) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  field_error(field, "expected a string label");
}

std::vector<double> get_number_array(const Json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Number -> constant vector; array -> vector of length n.
VectorXd get_vector(const Json& j, const std::string& field, Eigen::Index n) {
  if (j.is_number()) return VectorXd::Constant(n, j.get<double>());
  const auto v = get_number_array(j, field);
  if (static_cast<Eigen::Index>(v.size()) != n) {
    field_error(field, "expected length " + std::to_string(n));
  }
  return to_vector(v);
}

Vec4 get_vec4(const Json& j, const std::string& field) {
  return Vec4(get_vector(j, field, 4));
}

// Number -> scalar * I; array of rows -> n x n matrix.
SymMatrix get_matrix(const Json& j, const std::string& field, Eigen::Index n) {
  if (j.is_number()) return SymMatrix::identity(n, j.get<double>());
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    field_error(field, "expected a number or " + std::to_string(n) + " rows");
  }
  MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    const auto row = get_number_array(j[r], row_field);
    if (static_cast<Eigen::Index>(row.size()) != n) {
      field_error(row_field, "expected " + std::to_string(n) + " columns");
    }
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = row[c];
  }
  return SymMatrix(m);
}

Json vector_json(const VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json matrix_json(const MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out.push_back(vector_json(m.row(r).transpose()));
  }
  return out;
}

Json theta_json(const Gb2Params& t) {
  return Json::array({t.a(), t.b(), t.p(), t.q()});
}

Gb2Params theta_from_json(const Json& j, const std::string& field) {
  const auto v = get_number_array(j, field);
  if (v.size() != 4) field_error(field, "expected [a, b, p, q]");
  try {
    return Gb2Params(v[0], v[1], v[2], v[3]);
  } catch (const DomainError& e) {
    field_error(field, e.what());
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(
        start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(context + ": '" + s + "' is not a number");
  }
  return v;
}

void put_le(std::string& buf, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    buf.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

double get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<double>(bits);
}

const char* kind_name(ModelKind k) {
  return k == ModelKind::Dynamic ? "dynamic" : "independent";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename into " + path.string() + ": " + ec.message());
}

Json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string sha256_file(const fs::path& path) {
  const std::string data = read_text(path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw IoError("sha256 failed for " + path.string());
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xf]);
  }
  return out;
}

// ---------------------------------------------------------------------------

Dataset dataset_from_json(const Json& j) {
  check_keys(j, "", {"labels", "thresholds", "counts"});
  for (const char* key : {"labels", "thresholds", "counts"}) {
    if (!j.contains(key)) field_error(key, "missing");
    if (!j[key].is_array()) field_error(key, "expected an array");
  }
  const Json& labels = j["labels"];
  const Json& thresholds = j["thresholds"];
  const Json& counts = j["counts"];
  if (thresholds.size() != labels.size() || counts.size() != labels.size()) {
    throw DataError("dataset: labels, thresholds and counts must have equal length");
  }
  Dataset data;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const std::string idx = "[" + std::to_string(t) + "]";
    data.labels.push_back(get_label(labels[t], "labels" + idx));
    const auto y = get_number_array(thresholds[t], "thresholds" + idx);
    if (!counts[t].is_array()) field_error("counts" + idx, "expected an array");
    std::vector<std::int64_t> n;
    for (std::size_t k = 0; k < counts[t].size(); ++k) {
      const Json& c = counts[t][k];
      if (!c.is_number_integer()) {
        field_error("counts" + idx + "[" + std::to_string(k) + "]",
                    "expected an integer");
      }
      n.push_back(c.get<std::int64_t>());
    }
    try {
      data.periods.emplace_back(y, n);
    } catch (const DataError& e) {
      throw DataError("dataset period " + data.labels.back() + ": " + e.what());
    }
  }
  data.validate();
  return data;
}

Json dataset_to_json(const Dataset& data) {
  Json j;
  j["labels"] = data.labels;
  Json thresholds = Json::array();
  Json counts = Json::array();
  for (const auto& obs : data.periods) {
    thresholds.push_back(obs.thresholds());
    counts.push_back(obs.counts());
  }
  j["thresholds"] = std::move(thresholds);
  j["counts"] = std::move(counts);
  return j;
}

Dataset read_dataset(const fs::path& path) {
  try {
    return dataset_from_json(read_json(path));
  } catch (const DimensionError&) {
    throw;
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_dataset(const fs::path& path, const Dataset& data) {
  write_text(path, dump_json(dataset_to_json(data)));
}

// ---------------------------------------------------------------------------

CovariateTable read_covariate_table(const fs::path& path) {
  std::istringstream in(read_text(path));
  CovariateTable table;
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    if (header) {
      if (cells.size() < 2) {
        throw DataError(ctx + ": header needs a label column and at least one series");
      }
      table.names.assign(cells.begin() + 1, cells.end());
      header = false;
      continue;
    }
    if (cells.size() != table.names.size() + 1) {
      throw DataError(ctx + ": expected " + std::to_string(table.names.size() + 1) +
                      " columns, found " + std::to_string(cells.size()));
    }
    table.labels.push_back(cells[0]);
    VectorXd row(static_cast<Eigen::Index>(table.names.size()));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      row[static_cast<Eigen::Index>(c - 1)] = parse_double(cells[c], ctx);
    }
    table.rows.push_back(std::move(row));
  }
  if (header) throw DataError(path.string() + ": empty covariates file");
  if (table.rows.empty()) throw DataError(path.string() + ": no covariate rows");
  return table;
}

CovariatePanel load_covariates(const fs::path& path, bool log_diff) {
  const CovariateTable table = read_covariate_table(path);
  try {
    if (log_diff) return log_difference(table.rows, table.labels);
    return CovariatePanel(table.rows, table.labels);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_covariates(const fs::path& path, const CovariatePanel& covs,
                      const std::vector<std::string>& names) {
  std::string out = "period";
  for (Eigen::Index j = 0; j < covs.dim(); ++j) {
    out += ",";
    out += names.empty() ? "x" + std::to_string(j + 1) : names[j];
  }
  out += "\n";
  for (std::size_t t = 0; t < covs.periods(); ++t) {
    out += covs.labels().empty() ? std::to_string(t + 1) : covs.labels()[t];
    for (Eigen::Index j = 0; j < covs.dim(); ++j) {
      out += "," + format_double(covs.x(t)[j]);
    }
    out += "\n";
  }
  write_text(path, out);
}

// ---------------------------------------------------------------------------

Hyperparameters RunConfig::resolve_hyperparameters(Eigen::Index d) const {
  Hyperparameters h = Hyperparameters::defaults(d);
  const Json& o = hyperparameters;
  const std::string w = "hyperparameters";
  if (o.contains("beta0")) h.beta0 = get_vector(o["beta0"], join(w, "beta0"), 4 * d);
  if (o.contains("delta0")) h.delta0 = get_matrix(o["delta0"], join(w, "delta0"), 4 * d);
  if (o.contains("mu0")) h.mu0 = get_vec4(o["mu0"], join(w, "mu0"));
  if (o.contains("phi0")) h.phi0 = get_matrix(o["phi0"], join(w, "phi0"), 4);
  if (o.contains("n0")) h.n0 = get_number(o["n0"], join(w, "n0"));
  if (o.contains("omega0")) h.omega0 = get_matrix(o["omega0"], join(w, "omega0"), 4);
  if (o.contains("m0")) h.m0 = get_number(o["m0"], join(w, "m0"));
  if (o.contains("sigma0")) h.sigma0 = get_matrix(o["sigma0"], join(w, "sigma0"), 4 * d);
  h.validate(d);
  return h;
}

RunConfig config_from_json(const Json& j) {
  check_keys(j, "", {"iterations", "burn_in", "thin", "seed", "threads", "tarbmh",
                     "hyperparameters", "prior_shape", "prior_rate",
                     "density_grid"});
  RunConfig cfg;
  McmcConfig& m = cfg.mcmc;
  if (j.contains("iterations")) m.iterations = get_count(j["iterations"], "iterations");
  if (j.contains("burn_in")) m.burn_in = get_count(j["burn_in"], "burn_in");
  if (j.contains("thin")) m.thin = get_count(j["thin"], "thin");
  if (j.contains("seed")) m.seed = get_count(j["seed"], "seed");
  if (j.contains("threads")) {
    m.threads = static_cast<unsigned>(get_count(j["threads"], "threads"));
  }
  if (j.contains("tarbmh")) {
    const Json& t = j["tarbmh"];
    check_keys(t, "tarbmh", {"dof", "anneal_initial_temp", "anneal_cooling",
                             "anneal_steps", "anneal_move_scale", "refine_iters",
                             "fd_step"});
    TarbmhConfig& c = m.tarbmh;
    if (t.contains("dof")) c.dof = get_number(t["dof"], "tarbmh.dof");
    if (t.contains("anneal_initial_temp")) {
      c.anneal_initial_temp = get_number(t["anneal_initial_temp"], "tarbmh.anneal_initial_temp");
    }
    if (t.contains("anneal_cooling")) {
      c.anneal_cooling = get_number(t["anneal_cooling"], "tarbmh.anneal_cooling");
    }
    if (t.contains("anneal_steps")) {
      c.anneal_steps = get_int(t["anneal_steps"], "tarbmh.anneal_steps");
    }
    if (t.contains("anneal_move_scale")) {
      c.anneal_move_scale = get_number(t["anneal_move_scale"], "tarbmh.anneal_move_scale");
    }
    if (t.contains("refine_iters")) {
      c.refine_iters = get_int(t["refine_iters"], "tarbmh.refine_iters");
    }
    if (t.contains("fd_step")) c.fd_step = get_number(t["fd_step"], "tarbmh.fd_step");
  }
  if (j.contains("hyperparameters")) {
    const Json& h = j["hyperparameters"];
    check_keys(h, "hyperparameters",
               {"beta0", "delta0", "mu0", "phi0", "n0", "omega0", "m0", "sigma0"});
    for (const auto& [key, value] : h.items()) {
      if (!value.is_number() && !value.is_array()) {
        field_error("hyperparameters." + key, "expected a number or an array");
      }
    }
    cfg.hyperparameters = h;
  }
  if (j.contains("prior_shape")) cfg.prior_shape = get_number(j["prior_shape"], "prior_shape");
  if (j.contains("prior_rate")) cfg.prior_rate = get_number(j["prior_rate"], "prior_rate");
  if (j.contains("density_grid")) {
    const Json& g = j["density_grid"];
    check_keys(g, "density_grid", {"points", "upper"});
    if (g.contains("points")) {
      cfg.density_grid.points = get_int(g["points"], "density_grid.points");
    }
    if (g.contains("upper") && !g["upper"].is_null()) {
      cfg.density_grid.upper = get_number(g["upper"], "density_grid.upper");
    }
  }
  if (cfg.density_grid.points < 2) field_error("density_grid.points", "must be >= 2");
  if (cfg.density_grid.upper && !(*cfg.density_grid.upper > 0.0)) {
    field_error("density_grid.upper", "must be positive");
  }
  if (!(cfg.prior_shape > 0.0)) field_error("prior_shape", "must be positive");
  if (!(cfg.prior_rate > 0.0)) field_error("prior_rate", "must be positive");
  try {
    m.validate();
  } catch (const DataError& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig read_config(const fs::path& path) {
  try {
    return config_from_json(read_json(path));
  } catch (const DataError& e) {
    const std::string msg = e.what();
    if (msg.starts_with(path.string())) throw;
    throw DataError(path.string() + ": " + msg);
  }
}

Json config_to_json(const RunConfig& cfg) {
  const McmcConfig& m = cfg.mcmc;
  const TarbmhConfig& t = m.tarbmh;
  Json j;
  j["iterations"] = m.iterations;
  j["burn_in"] = m.burn_in;
  j["thin"] = m.thin;
  j["seed"] = m.seed;
  j["tarbmh"] = {{"dof", t.dof},
                 {"anneal_initial_temp", t.anneal_initial_temp},
                 {"anneal_cooling", t.anneal_cooling},
                 {"anneal_steps", t.anneal_steps},
                 {"anneal_move_scale", t.anneal_move_scale},
                 {"refine_iters", t.refine_iters},
                 {"fd_step", t.fd_step}};
  j["hyperparameters"] = cfg.hyperparameters;
  j["prior_shape"] = cfg.prior_shape;
  j["prior_rate"] = cfg.prior_rate;
  j["density_grid"] = {{"points", cfg.density_grid.points},
                       {"upper", cfg.density_grid.upper
                                     ? Json(*cfg.density_grid.upper)
                                     : Json(nullptr)}};
  return j;
}

Json hyperparameters_to_json(const Hyperparameters& h) {
  return {{"beta0", vector_json(h.beta0)},       {"delta0", matrix_json(h.delta0.matrix())},
          {"mu0", vector_json(h.mu0)},           {"phi0", matrix_json(h.phi0.matrix())},
          {"n0", h.n0},                          {"omega0", matrix_json(h.omega0.matrix())},
          {"m0", h.m0},                          {"sigma0", matrix_json(h.sigma0.matrix())}};
}

// ---------------------------------------------------------------------------

SynthSpec synth_spec_from_json(const Json& j) {
  check_keys(j, "", {"periods", "n", "groups", "seed", "labels", "theta", "model"});
  SynthSpec spec;
  if (j.contains("periods")) spec.periods = get_count(j["periods"], "periods");
  if (j.contains("n")) spec.n = static_cast<std::int64_t>(get_count(j["n"], "n"));
  if (j.contains("groups")) {
    spec.groups = static_cast<std::int64_t>(get_count(j["groups"], "groups"));
  }
  if (j.contains("seed")) spec.seed = get_count(j["seed"], "seed");
  if (j.contains("labels")) {
    if (!j["labels"].is_array()) field_error("labels", "expected an array");
    for (std::size_t t = 0; t < j["labels"].size(); ++t) {
      spec.labels.push_back(get_label(j["labels"][t], "labels[" + std::to_string(t) + "]"));
    }
  }
  if (j.contains("theta") && j.contains("model")) {
    field_error("theta", "give either theta or model, not both");
  }
  if (j.contains("theta")) {
    const Json& th = j["theta"];
    spec.theta.clear();
    if (th.is_array() && !th.empty() && th[0].is_array()) {
      for (std::size_t t = 0; t < th.size(); ++t) {
        spec.theta.push_back(theta_from_json(th[t], "theta[" + std::to_string(t) + "]"));
      }
    } else {
      spec.theta.push_back(theta_from_json(th, "theta"));
    }
  }
  if (j.contains("model")) {
    const Json& mj = j["model"];
    check_keys(mj, "model", {"mu", "omega", "covariates", "beta", "beta1", "sigma"});
    for (const char* key : {"mu", "omega", "covariates"}) {
      if (!mj.contains(key)) field_error(join("model", key), "missing");
    }
    const Json& cj = mj["covariates"];
    if (!cj.is_array() || cj.empty()) {
      field_error("model.covariates", "expected one row per period");
    }
    std::vector<VectorXd> rows;
    for (std::size_t t = 0; t < cj.size(); ++t) {
      rows.push_back(to_vector(
          get_number_array(cj[t], "model.covariates[" + std::to_string(t) + "]")));
    }
    std::vector<std::string> labels = spec.labels;
    if (labels.empty()) {
      SynthSpec probe = spec;
      probe.periods = rows.size();
      labels = probe.resolved_labels();
    }
    ModelTruth m;
    try {
      m.covariates = CovariatePanel(rows, labels);
    } catch (const DataError& e) {
      field_error("model.covariates", e.what());
    }
    const Eigen::Index d = m.covariates.dim();
    m.mu = get_vec4(mj["mu"], "model.mu");
    m.omega = get_matrix(mj["omega"], "model.omega", 4);
    if (mj.contains("beta")) {
      const Json& bj = mj["beta"];
      if (!bj.is_array()) field_error("model.beta", "expected one row per period");
      for (std::size_t t = 0; t < bj.size(); ++t) {
        m.beta.push_back(get_vector(bj[t], "model.beta[" + std::to_string(t) + "]", 4 * d));
      }
    } else {
      if (!mj.contains("beta1")) field_error("model.beta1", "missing (or give model.beta)");
      if (!mj.contains("sigma")) field_error("model.sigma", "missing (or give model.beta)");
      m.beta1 = get_vector(mj["beta1"], "model.beta1", 4 * d);
      m.sigma = get_matrix(mj["sigma"], "model.sigma", 4 * d);
    }
    if (!j.contains("periods")) spec.periods = rows.size();
    spec.model = std::move(m);
  }
  spec.validate();
  return spec;
}

Json synth_truth_to_json(const SynthTruth& truth) {
  Json j;
  j["labels"] = truth.labels;
  Json theta = Json::array(), h = Json::array(), gini = Json::array();
  for (std::size_t t = 0; t < truth.theta.size(); ++t) {
    theta.push_back(theta_json(truth.theta[t]));
    h.push_back(vector_json(truth.h[t]));
    gini.push_back(truth.gini[t] ? Json(*truth.gini[t]) : Json(nullptr));
  }
  j["theta"] = std::move(theta);
  j["h"] = std::move(h);
  j["gini"] = std::move(gini);
  if (truth.mu) j["mu"] = vector_json(*truth.mu);
  if (truth.omega) j["omega"] = matrix_json(truth.omega->matrix());
  if (truth.beta) {
    Json beta = Json::array();
    for (const auto& b : *truth.beta) beta.push_back(vector_json(b));
    j["beta"] = std::move(beta);
  }
  return j;
}

// ---------------------------------------------------------------------------

std::size_t record_length(ModelKind kind, std::size_t periods, Eigen::Index d) {
  const auto T = periods;
  const auto k = static_cast<std::size_t>(4 * d);
  if (kind == ModelKind::Independent) return 4 * T;
  return 4 * T + 4 + k * T + 16 + k * k;
}

fs::path sidecar_path(const fs::path& chain_path) {
  fs::path p = chain_path;
  p += ".json";
  return p;
}

Json acceptance_to_json(const AcceptanceStats& stats,
                        const std::vector<std::string>& labels) {
  Json periods = Json::array();
  for (std::size_t t = 0; t < stats.periods.size(); ++t) {
    const PeriodAcceptance& p = stats.periods[t];
    Json blocks = Json::object();
    for (int b = 0; b < 6; ++b) {
      blocks[kBlockNames[b]] = {{"proposals", p.blocks[b].proposals},
                                {"accepts", p.blocks[b].accepts},
                                {"fallbacks", p.blocks[b].fallbacks}};
    }
    periods.push_back({{"label", t < labels.size() ? labels[t] : std::to_string(t + 1)},
                       {"proposals", p.proposals()},
                       {"accepts", p.accepts()},
                       {"fallbacks", p.fallbacks()},
                       {"rate", p.rate()},
                       {"blocks", std::move(blocks)}});
  }
  return {{"overall_rate", stats.overall_rate()}, {"periods", std::move(periods)}};
}

Json chain_sidecar(const Chain& chain) {
  const auto T = chain.periods();
  const Eigen::Index d = chain.covariate_dim;
  Json layout = Json::array();
  layout.push_back({{"name", "H"}, {"rows", T}, {"cols", 4}});
  if (chain.kind == ModelKind::Dynamic) {
    layout.push_back({{"name", "mu"}, {"rows", 1}, {"cols", 4}});
    layout.push_back({{"name", "B"}, {"rows", T}, {"cols", 4 * d}});
    layout.push_back({{"name", "omega_inv"}, {"rows", 4}, {"cols", 4}});
    layout.push_back({{"name", "sigma_inv"}, {"rows", 4 * d}, {"cols", 4 * d}});
  }
  RunConfig cfg;
  cfg.mcmc = chain.config;
  cfg.prior_shape = chain.prior_shape;
  cfg.prior_rate = chain.prior_rate;
  Json config = config_to_json(cfg);
  config.erase("hyperparameters");
  config.erase("density_grid");
  if (chain.kind == ModelKind::Dynamic) {
    config.erase("prior_shape");
    config.erase("prior_rate");
  }
  Json j;
  j["format"] = kChainFormat;
  j["version"] = kChainVersion;
  j["kind"] = kind_name(chain.kind);
  j["periods"] = T;
  j["covariate_dim"] = d;
  j["draws"] = chain.draws.size();
  j["record_doubles"] = record_length(chain.kind, T, d);
  j["byte_order"] = "little";
  j["value_type"] = "float64";
  j["layout"] = std::move(layout);
  j["labels"] = chain.labels;
  j["iterations"] = chain.iterations;
  j["config"] = std::move(config);
  j["acceptance"] = acceptance_to_json(chain.acceptance, chain.labels);
  return j;
}

void write_chain(const fs::path& path, const Chain& chain) {
  const auto T = chain.periods();
  const Eigen::Index d = chain.covariate_dim;
  const std::size_t rec = record_length(chain.kind, T, d);
  std::string buf;
  buf.reserve(chain.draws.size() * rec * 8);
  for (const ChainDraw& draw : chain.draws) {
    for (std::size_t t = 0; t < T; ++t) {
      for (int i = 0; i < 4; ++i) put_le(buf, draw.H[t].h[i]);
    }
    if (chain.kind == ModelKind::Independent) continue;
    for (int i = 0; i < 4; ++i) put_le(buf, draw.mu[i]);
    for (std::size_t t = 0; t < T; ++t) {
      for (Eigen::Index i = 0; i < 4 * d; ++i) put_le(buf, draw.B[t][i]);
    }
    for (const SymMatrix* m : {&draw.omega_inv, &draw.sigma_inv}) {
      for (Eigen::Index r = 0; r < m->dim(); ++r) {
        for (Eigen::Index c = 0; c < m->dim(); ++c) put_le(buf, (*m)(r, c));
      }
    }
  }
  write_text(path, buf);
  write_text(sidecar_path(path), dump_json(chain_sidecar(chain)));
}

Chain read_chain(const fs::path& path) {
  const Json side = read_json(sidecar_path(path));
  const std::string where = sidecar_path(path).string();
  try {
    if (!side.contains("format") || side["format"] != kChainFormat) {
      throw DataError("not a chain sidecar");
    }
    if (side.value("version", 0) != kChainVersion) {
      throw DataError("unsupported chain version");
    }
    Chain chain;
    const std::string kind = side.at("kind").get<std::string>();
    if (kind == "dynamic") {
      chain.kind = ModelKind::Dynamic;
    } else if (kind == "independent") {
      chain.kind = ModelKind::Independent;
    } else {
      field_error("kind", "unknown chain kind '" + kind + "'");
    }
    const auto T = get_count(side.at("periods"), "periods");
    const auto d = static_cast<Eigen::Index>(get_count(side.at("covariate_dim"), "covariate_dim"));
    const auto M = get_count(side.at("draws"), "draws");
    chain.covariate_dim = d;
    for (const auto& l : side.at("labels")) chain.labels.push_back(l.get<std::string>());
    if (chain.labels.size() != T) field_error("labels", "expected one per period");
    for (const auto& it : side.at("iterations")) chain.iterations.push_back(it.get<std::uint64_t>());
    if (chain.iterations.size() != M) field_error("iterations", "expected one per draw");
    const Json& cj = side.at("config");
    const RunConfig cfg = config_from_json(cj);
    chain.config = cfg.mcmc;
    chain.prior_shape = cfg.prior_shape;
    chain.prior_rate = cfg.prior_rate;

    const Json& acc = side.at("acceptance").at("periods");
    if (acc.size() != T) field_error("acceptance.periods", "expected one per period");
    chain.acceptance.periods.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
      for (int b = 0; b < 6; ++b) {
        const Json& bj = acc[t].at("blocks").at(kBlockNames[b]);
        BlockCounters& c = chain.acceptance.periods[t].blocks[b];
        c.proposals = bj.at("proposals").get<std::uint64_t>();
        c.accepts = bj.at("accepts").get<std::uint64_t>();
        c.fallbacks = bj.at("fallbacks").get<std::uint64_t>();
      }
    }

    const std::string bytes = read_text(path);
    const std::size_t rec = record_length(chain.kind, T, d);
    if (bytes.size() != M * rec * 8) {
      throw DataError(path.string() + ": size " + std::to_string(bytes.size()) +
                      " bytes, expected " + std::to_string(M * rec * 8));
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    auto next = [&p] {
      const double v = get_le(p);
      p += 8;
      return v;
    };
    chain.draws.resize(M);
    for (ChainDraw& draw : chain.draws) {
      draw.H.resize(T);
      for (auto& s : draw.H) {
        for (int i = 0; i < 4; ++i) s.h[i] = next();
      }
      if (chain.kind == ModelKind::Independent) continue;
      for (int i = 0; i < 4; ++i) draw.mu[i] = next();
      draw.B.assign(T, VectorXd(4 * d));
      for (auto& b : draw.B) {
        for (Eigen::Index i = 0; i < 4 * d; ++i) b[i] = next();
      }
      for (auto [m, n] : {std::pair{&draw.omega_inv, Eigen::Index{4}},
                          std::pair{&draw.sigma_inv, 4 * d}}) {
        MatrixXd mat(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
          for (Eigen::Index c = 0; c < n; ++c) mat(r, c) = next();
        }
        *m = SymMatrix(mat);
      }
    }
    return chain;
  } catch (const Json::exception& e) {
    throw DataError(where + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  }
}

}  // namespace gb2ss::io
