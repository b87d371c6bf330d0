#include <string>

#include "gb2ss/errors.hpp"
#include "gb2ss/samplers.hpp"

namespace gb2ss {
namespace {

void check_path(const std::vector<LatentState>& H, const CoefficientPath& B,
                const CovariatePanel& covs, const char* fn) {
  if (H.size() != covs.periods() || B.size() != covs.periods()) {
    throw DimensionError(std::string(fn) + ": H, B and covariates must span T");
  }
}

// (S + P^{-1})^{-1} as P (I + S P)^{-1}; reduces to P exactly when S = 0.
SymMatrix posterior_scale(const MatrixXd& s, const SymMatrix& prior_scale) {
  const MatrixXd& p = prior_scale.matrix();
  // P (I + S P)^{-1} = ((I + P S)^{-1} P)'
  const Eigen::PartialPivLU<MatrixXd> lu(MatrixXd::Identity(p.rows(), p.cols()) + p * s);
  const MatrixXd out = lu.solve(p).transpose();
  if (!out.allFinite()) {
    throw NotPositiveDefinite(0, "posterior Wishart scale is singular");
  }
  SymMatrix result(out);
  (void)cholesky(result, Jitter::RetryOnce);
  return result;
}

}  // namespace

GaussianMoments mu_conditional(const std::vector<LatentState>& H,
                               const CoefficientPath& B,
                               const CovariatePanel& covs,
                               const SymMatrix& omega_inv,
                               const Hyperparameters& hyper) {
  check_path(H, B, covs, "mu_conditional");
  const double T = static_cast<double>(H.size());
  const SymMatrix phi0_inv = inverse_pd(hyper.phi0);
  Vec4 resid_sum = Vec4::Zero();
  for (std::size_t t = 0; t < H.size(); ++t) {
    resid_sum += H[t].h - design_apply(covs.x(t), B[t]);
  }
  GaussianMoments out;
  out.cov = inverse_pd(SymMatrix(T * omega_inv.matrix() + phi0_inv.matrix()),
                       Jitter::RetryOnce);
  out.mean = out.cov.matrix() *
             (omega_inv.matrix() * resid_sum + phi0_inv.matrix() * hyper.mu0);
  return out;
}

Vec4 draw_mu(const std::vector<LatentState>& H, const CoefficientPath& B,
             const CovariatePanel& covs, const SymMatrix& omega_inv,
             const Hyperparameters& hyper, Rng& rng) {
  const GaussianMoments c = mu_conditional(H, B, covs, omega_inv, hyper);
  return sample_mvn(c.mean, c.cov, rng, Jitter::RetryOnce);
}

WishartMoments omega_inv_conditional(const std::vector<LatentState>& H,
                                     const Vec4& mu, const CoefficientPath& B,
                                     const CovariatePanel& covs,
                                     const Hyperparameters& hyper) {
  check_path(H, B, covs, "omega_inv_conditional");
  MatrixXd s = MatrixXd::Zero(4, 4);
  for (std::size_t t = 0; t < H.size(); ++t) {
    const Vec4 e = H[t].h - mu - design_apply(covs.x(t), B[t]);
    s += e * e.transpose();
  }
  WishartMoments out;
  out.dof = hyper.n0 + static_cast<double>(H.size());
  out.scale = posterior_scale(s, hyper.omega0);
  return out;
}

SymMatrix draw_omega_inv(const std::vector<LatentState>& H, const Vec4& mu,
                         const CoefficientPath& B, const CovariatePanel& covs,
                         const Hyperparameters& hyper, Rng& rng) {
  const WishartMoments w = omega_inv_conditional(H, mu, B, covs, hyper);
  return sample_wishart(w.dof, w.scale, rng);
}

WishartMoments sigma_inv_conditional(const CoefficientPath& B,
                                     const Hyperparameters& hyper) {
  if (B.size() < 2) {
    throw DimensionError("sigma_inv_conditional: need T >= 2");
  }
  const Eigen::Index k = hyper.sigma0.dim();
  MatrixXd s = MatrixXd::Zero(k, k);
  for (std::size_t t = 1; t < B.size(); ++t) {
    const VectorXd v = B[t] - B[t - 1];
    s += v * v.transpose();
  }
  WishartMoments out;
  out.dof = hyper.m0 + static_cast<double>(B.size()) - 1.0;
  out.scale = posterior_scale(s, hyper.sigma0);
  return out;
}

SymMatrix draw_sigma_inv(const CoefficientPath& B, const Hyperparameters& hyper,
                         Rng& rng) {
  const WishartMoments w = sigma_inv_conditional(B, hyper);
  return sample_wishart(w.dof, w.scale, rng);
}

}  // namespace gb2ss
