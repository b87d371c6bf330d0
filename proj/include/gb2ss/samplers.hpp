#ifndef GB2SS_SAMPLERS_HPP_
#define GB2SS_SAMPLERS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "gb2ss/model.hpp"
#include "gb2ss/rng.hpp"
#include "gb2ss/stochlin.hpp"

namespace gb2ss {

// ----------------------------------------------------------------------------
// Tailored randomized-block Metropolis-Hastings for one period's h_t.
// ----------------------------------------------------------------------------

struct TarbmhConfig {
  double dof = 15.0;                 // t-proposal degrees of freedom
  double anneal_initial_temp = 5.0;
  double anneal_cooling = 0.9;       // geometric, per step
  int anneal_steps = 200;
  double anneal_move_scale = 0.25;   // Gaussian move sd per coordinate
  int refine_iters = 100;            // max polish cycles
  double fd_step = 1e-4;             // relative central-difference step

  void validate() const;
};

// Unnormalized log target over the full 4-vector h. May return -inf.
using LogTarget = std::function<double(const Vec4&)>;

// Two coordinates updated jointly, ascending.
using Block = std::array<int, 2>;
// The two blocks in processing order.
using BlockPartition = std::array<Block, 2>;

// Uniform over the three ways of pairing {0,1,2,3}, in uniformly random
// processing order.
BlockPartition random_block_partition(Rng& rng);

// Index 0..5 of an unordered pair: 01, 02, 03, 12, 13, 23.
int block_index(const Block& block);

struct BlockCounters {
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;
  std::uint64_t fallbacks = 0;  // Hessian not usable, scale fell back to 0.1 I
};

struct PeriodAcceptance {
  std::array<BlockCounters, 6> blocks{};

  std::uint64_t proposals() const;
  std::uint64_t accepts() const;
  std::uint64_t fallbacks() const;
  double rate() const;
};

struct AcceptanceStats {
  std::vector<PeriodAcceptance> periods;

  double overall_rate() const;
};

struct TailoredProposal {
  Eigen::Vector2d mode;
  SymMatrix scale;     // the multivariate-t scale matrix Psi
  MatrixXd chol;       // lower Cholesky factor of scale
  bool fallback = false;
};

// Maximize `target` over the block coordinates (others fixed at h_current),
// warm-started at h_current: simulated annealing, then coordinate-wise line
// searches with a pattern move. Psi is the inverse negative central-difference
// Hessian at the mode.
TailoredProposal tailor_proposal(const LogTarget& target, const Block& block,
                                 const Vec4& h_current,
                                 const TarbmhConfig& cfg, Rng& rng);

// log of the MH ratio pi(cand) q(cur) / (pi(cur) q(cand)).
double log_acceptance_ratio(double log_target_cand, double log_target_cur,
                            double log_q_cand, double log_q_cur);
// Accept iff u <= alpha; a -inf candidate is never accepted and a -inf
// current state is always left.
bool mh_accept(double log_target_cand, double log_target_cur, double log_alpha,
               double u);

// One TaRBMH update of h_t. Counters are accumulated into `stats`.
Vec4 tarbmh_sweep(const LogTarget& target, const Vec4& h_current,
                  const TarbmhConfig& cfg, Rng& rng, PeriodAcceptance& stats);

// Generic derivative-free maximizer used for tailoring and initialization:
// annealing from x0 followed by line-search polish.
VectorXd anneal_maximize(const std::function<double(const VectorXd&)>& f,
                         const VectorXd& x0, const TarbmhConfig& cfg, Rng& rng);

// Central-difference Hessian of f at x (relative step `rel_step`).
MatrixXd fd_hessian(const std::function<double(const VectorXd&)>& f,
                    const VectorXd& x, double rel_step);

// ----------------------------------------------------------------------------
// Forward filtering, backward sampling for B = (beta_1..beta_T).
// ----------------------------------------------------------------------------

struct FilterMoments {
  std::vector<VectorXd> m;  // filtered means m_1..m_T
  std::vector<MatrixXd> C;  // filtered covariances C_1..C_T
};

// Kalman recursions with m_0 = beta0, C_0 = Delta0, R_t = C_{t-1} + Sigma.
// omega and sigma are covariances.
FilterMoments kalman_filter(const std::vector<LatentState>& H, const Vec4& mu,
                            const SymMatrix& omega, const SymMatrix& sigma,
                            const CovariatePanel& covs,
                            const Hyperparameters& hyper);

struct GaussianMoments {
  VectorXd mean;
  SymMatrix cov;
};

// Moments of beta_t | beta_{t+1}, H:
// m_t + G (beta_next - m_t), C_t - G (C_t + Sigma) G', G = C_t (C_t + Sigma)^{-1}.
GaussianMoments backward_moments(const VectorXd& m_t, const MatrixXd& C_t,
                                 const SymMatrix& sigma,
                                 const VectorXd& beta_next);

CoefficientPath ffbs(const std::vector<LatentState>& H, const Vec4& mu,
                     const SymMatrix& omega, const SymMatrix& sigma,
                     const CovariatePanel& covs, const Hyperparameters& hyper,
                     Rng& rng);

// ----------------------------------------------------------------------------
// Conjugate Gibbs conditionals.
// ----------------------------------------------------------------------------

GaussianMoments mu_conditional(const std::vector<LatentState>& H,
                               const CoefficientPath& B,
                               const CovariatePanel& covs,
                               const SymMatrix& omega_inv,
                               const Hyperparameters& hyper);
Vec4 draw_mu(const std::vector<LatentState>& H, const CoefficientPath& B,
             const CovariatePanel& covs, const SymMatrix& omega_inv,
             const Hyperparameters& hyper, Rng& rng);

struct WishartMoments {
  double dof = 0.0;
  SymMatrix scale;
};

// n = n0 + T, scale = (sum_{t=1..T} e_t e_t' + Omega0^{-1})^{-1}.
WishartMoments omega_inv_conditional(const std::vector<LatentState>& H,
                                     const Vec4& mu, const CoefficientPath& B,
                                     const CovariatePanel& covs,
                                     const Hyperparameters& hyper);
SymMatrix draw_omega_inv(const std::vector<LatentState>& H, const Vec4& mu,
                         const CoefficientPath& B, const CovariatePanel& covs,
                         const Hyperparameters& hyper, Rng& rng);

// m = m0 + T - 1, scale = (sum_{t=2..T} v_t v_t' + Sigma0^{-1})^{-1}.
WishartMoments sigma_inv_conditional(const CoefficientPath& B,
                                     const Hyperparameters& hyper);
SymMatrix draw_sigma_inv(const CoefficientPath& B, const Hyperparameters& hyper,
                         Rng& rng);

}  // namespace gb2ss

#endif  // GB2SS_SAMPLERS_HPP_
