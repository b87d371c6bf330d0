#include "gb2ss/model.hpp"

#include <cmath>
#include <set>
#include <string>

#include "gb2ss/errors.hpp"

namespace gb2ss {
namespace {

SymMatrix scaled_identity(Eigen::Index n, double s) {
  return SymMatrix::identity(n, s);
}

void require_pd(const SymMatrix& m, Eigen::Index dim, const char* name) {
  if (m.dim() != dim) {
    throw DimensionError(std::string("hyperparameters: ") + name + " must be " +
                         std::to_string(dim) + "x" + std::to_string(dim));
  }
  try {
    (void)cholesky(m);
  } catch (const NotPositiveDefinite&) {
    throw DataError(std::string("hyperparameters: ") + name +
                    " must be positive definite");
  }
}

constexpr double kMaxCondition = 1e12;

}  // namespace

CovariatePanel::CovariatePanel(std::vector<VectorXd> x,
                               std::vector<std::string> labels)
    : x_(std::move(x)), labels_(std::move(labels)) {
  if (x_.empty()) throw DataError("covariates: at least one period required");
  dim_ = x_.front().size();
  if (dim_ < 1) throw DataError("covariates: dimension d must be >= 1");
  for (std::size_t t = 0; t < x_.size(); ++t) {
    if (x_[t].size() != dim_) {
      throw DimensionError("covariates: period " + std::to_string(t + 1) +
                           " has " + std::to_string(x_[t].size()) +
                           " entries, expected " + std::to_string(dim_));
    }
    if (!x_[t].allFinite()) {
      throw DataError("covariates: non-finite entry in period " +
                      std::to_string(t + 1));
    }
  }
  if (!labels_.empty() && labels_.size() != x_.size()) {
    throw DataError("covariates: label count does not match period count");
  }
}

CovariatePanel log_difference(const std::vector<VectorXd>& raw,
                              const std::vector<std::string>& labels) {
  if (raw.size() < 2) {
    throw DataError("covariates: log-difference needs at least two rows");
  }
  std::vector<VectorXd> out;
  std::vector<std::string> out_labels;
  for (std::size_t t = 1; t < raw.size(); ++t) {
    if (raw[t].size() != raw[t - 1].size()) {
      throw DimensionError("covariates: ragged raw series at row " +
                           std::to_string(t + 1));
    }
    if ((raw[t].array() <= 0.0).any() || (raw[t - 1].array() <= 0.0).any()) {
      throw DataError("covariates: log-difference requires positive raw "
                      "values (row " + std::to_string(t + 1) + ")");
    }
    out.push_back((raw[t].array().log() - raw[t - 1].array().log()).matrix());
    if (!labels.empty()) out_labels.push_back(labels.at(t));
  }
  return CovariatePanel(std::move(out), std::move(out_labels));
}

MatrixXd design_matrix(const VectorXd& x) {
  const Eigen::Index d = x.size();
  MatrixXd z = MatrixXd::Zero(4, 4 * d);
  for (Eigen::Index i = 0; i < 4; ++i) z.block(i, i * d, 1, d) = x.transpose();
  return z;
}

Vec4 design_apply(const VectorXd& x, const VectorXd& beta) {
  const Eigen::Index d = x.size();
  if (beta.size() != 4 * d) {
    throw DimensionError("design_apply: beta must have 4d entries");
  }
  Vec4 out;
  for (Eigen::Index i = 0; i < 4; ++i) out[i] = x.dot(beta.segment(i * d, d));
  return out;
}

Hyperparameters Hyperparameters::defaults(Eigen::Index d) {
  if (d < 1) throw DataError("hyperparameters: d must be >= 1");
  Hyperparameters h;
  h.beta0 = VectorXd::Zero(4 * d);
  h.delta0 = scaled_identity(4 * d, 100.0);
  h.mu0 = Vec4::Zero();
  h.phi0 = scaled_identity(4, 100.0);
  h.n0 = 5.0;
  h.omega0 = scaled_identity(4, 1000.0);
  h.m0 = 4.0 * static_cast<double>(d) + 1.0;
  h.sigma0 = scaled_identity(4 * d, 1000.0);
  return h;
}

void Hyperparameters::validate(Eigen::Index d) const {
  const Eigen::Index k = 4 * d;
  if (beta0.size() != k) {
    throw DimensionError("hyperparameters: beta0 must have 4d entries");
  }
  require_pd(delta0, k, "Delta0");
  require_pd(phi0, 4, "Phi0");
  require_pd(omega0, 4, "Omega0");
  require_pd(sigma0, k, "Sigma0");
  if (!(n0 > 3.0)) throw DataError("hyperparameters: n0 must exceed 3");
  if (!(m0 > static_cast<double>(k) - 1.0)) {
    throw DataError("hyperparameters: m0 must exceed 4d - 1");
  }
  if (condition_number(phi0) > kMaxCondition) {
    throw DataError("hyperparameters: Phi0 is ill-conditioned");
  }
  if (condition_number(delta0) > kMaxCondition) {
    throw DataError("hyperparameters: Delta0 is ill-conditioned");
  }
}

void Dataset::validate() const {
  if (periods.empty()) throw DataError("dataset: no periods");
  if (labels.size() != periods.size()) {
    throw DataError("dataset: " + std::to_string(labels.size()) +
                    " labels for " + std::to_string(periods.size()) +
                    " periods");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw DataError("dataset: duplicate period label '" + l + "'");
    }
  }
}

double log_state_density(const LatentState& h, const VectorXd& x,
                         const Vec4& mu, const VectorXd& beta,
                         const SymMatrix& omega_inv) {
  if (omega_inv.dim() != 4) {
    throw DimensionError("log_state_density: Omega^{-1} must be 4x4");
  }
  const Vec4 mean = mu + design_apply(x, beta);
  return mvn_log_density_precision(h.h, mean, omega_inv);
}

double log_coef_transition(const VectorXd& beta_next, const VectorXd& beta,
                           const SymMatrix& sigma_inv) {
  if (beta_next.size() != beta.size() || sigma_inv.dim() != beta.size()) {
    throw DimensionError("log_coef_transition: dimension mismatch");
  }
  return mvn_log_density_precision(beta_next, beta, sigma_inv);
}

void check_dimensions(const Dataset& data, const CovariatePanel& covs) {
  if (data.size() != covs.periods()) {
    throw DimensionError(
        "dataset has " + std::to_string(data.size()) + " periods (" +
        (data.labels.empty() ? std::string("?") : data.labels.front()) + ".." +
        (data.labels.empty() ? std::string("?") : data.labels.back()) +
        ") but covariates have " + std::to_string(covs.periods()) + " (" +
        (covs.labels().empty() ? std::string("unlabelled")
                               : covs.labels().front() + ".." +
                                     covs.labels().back()) +
        ")");
  }
  if (!covs.labels().empty() && !data.labels.empty()) {
    for (std::size_t t = 0; t < data.size(); ++t) {
      if (covs.labels()[t] != data.labels[t]) {
        throw DimensionError("covariate period '" + covs.labels()[t] +
                             "' does not match dataset period '" +
                             data.labels[t] + "'");
      }
    }
  }
}

double log_augmented_likelihood(const ChainDraw& draw, const Dataset& data,
                                const CovariatePanel& covs,
                                const Hyperparameters& hyper) {
  check_dimensions(data, covs);
  const std::size_t T = data.size();
  if (draw.H.size() != T || draw.B.size() != T) {
    throw DimensionError("log_augmented_likelihood: draw does not span T");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    total += log_grouped_likelihood(draw.H[t], data.periods[t]);
    total += log_state_density(draw.H[t], covs.x(t), draw.mu, draw.B[t],
                               draw.omega_inv);
  }
  total += mvn_log_density_precision(draw.B[0], hyper.beta0,
                                     inverse_pd(hyper.delta0));
  for (std::size_t t = 0; t + 1 < T; ++t) {
    total += log_coef_transition(draw.B[t + 1], draw.B[t], draw.sigma_inv);
  }
  return total;
}

}  // namespace gb2ss
