#ifndef GB2SS_MODEL_HPP_
#define GB2SS_MODEL_HPP_

#include <string>
#include <vector>

#include "gb2ss/glik.hpp"
#include "gb2ss/latent.hpp"
#include "gb2ss/stochlin.hpp"

namespace gb2ss {

/********************************************************************************
State-space model for time-varying GB2 parameters. With h_t = log(theta_t),
x_t the d covariates at period t and Z_t = I_4 (x) x_t':

    y_it  ~ GB2(exp(h_t))                           (grouped: thresholds, counts)
    h_t   = mu + Z_t beta_t + eps_t,   eps_t ~ N(0, Omega)
    beta_{t+1} = beta_t + eta_t,       eta_t ~ N(0, Sigma)
    beta_1 ~ N(beta_0, Delta_0)

Priors: mu ~ N(mu_0, Phi_0), Omega^{-1} ~ W(n_0, Omega_0),
Sigma^{-1} ~ W(m_0, Sigma_0).

beta_t is stacked parameter-major: entry i*d + j is the coefficient of
covariate j on log-parameter i (i = a, b, p, q).
********************************************************************************/

// Transformed covariates x_1..x_T, each of dimension d >= 1.
class CovariatePanel {
 public:
  CovariatePanel(std::vector<VectorXd> x, std::vector<std::string> labels = {});

  std::size_t periods() const { return x_.size(); }
  Eigen::Index dim() const { return dim_; }
  const VectorXd& x(std::size_t t) const { return x_[t]; }
  const std::vector<VectorXd>& rows() const { return x_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<VectorXd> x_;
  std::vector<std::string> labels_;
  Eigen::Index dim_ = 0;
};

// Raw series -> first difference of the logarithm; drops the first row and
// keeps the labels of rows 2..T. Every raw entry must be positive.
CovariatePanel log_difference(const std::vector<VectorXd>& raw,
                              const std::vector<std::string>& labels);

// Z_t = I_4 (x) x_t', a 4 x 4d matrix.
MatrixXd design_matrix(const VectorXd& x);
// Z_t beta without forming Z_t: component i equals x_t' beta_block(i).
Vec4 design_apply(const VectorXd& x, const VectorXd& beta);

using CoefficientPath = std::vector<VectorXd>;

struct Hyperparameters {
  VectorXd beta0;
  SymMatrix delta0;
  Vec4 mu0 = Vec4::Zero();
  SymMatrix phi0;
  double n0 = 5.0;
  SymMatrix omega0;
  double m0 = 0.0;
  SymMatrix sigma0;

  // beta0 = 0, Delta0 = 100 I, mu0 = 0, Phi0 = 100 I, n0 = 5,
  // Omega0 = 1000 I, m0 = 4d + 1, Sigma0 = 1000 I.
  static Hyperparameters defaults(Eigen::Index d);

  // Checks dimensions for covariate dimension d, positive definiteness,
  // n0 > 3, m0 > 4d - 1 and condition numbers of Phi0 and Delta0 (<= 1e12).
  void validate(Eigen::Index d) const;
};

struct ChainDraw {
  std::vector<LatentState> H;
  Vec4 mu = Vec4::Zero();
  CoefficientPath B;
  SymMatrix omega_inv;
  SymMatrix sigma_inv;
};

struct Dataset {
  std::vector<GroupedObservation> periods;
  std::vector<std::string> labels;

  std::size_t size() const { return periods.size(); }
  // Labels must be unique and match the number of periods.
  void validate() const;
};

double log_state_density(const LatentState& h, const VectorXd& x,
                         const Vec4& mu, const VectorXd& beta,
                         const SymMatrix& omega_inv);

double log_coef_transition(const VectorXd& beta_next, const VectorXd& beta,
                           const SymMatrix& sigma_inv);

// sum_t [log l(y_t | h_t) + log g(h_t | ...)] + log N(beta_1; beta0, Delta0)
//   + sum_{t<T} log h(beta_{t+1} | beta_t).
double log_augmented_likelihood(const ChainDraw& draw, const Dataset& data,
                                const CovariatePanel& covs,
                                const Hyperparameters& hyper);

// Throws DimensionError naming the first offending period label.
void check_dimensions(const Dataset& data, const CovariatePanel& covs);

}  // namespace gb2ss

#endif  // GB2SS_MODEL_HPP_
