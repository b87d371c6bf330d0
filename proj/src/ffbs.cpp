#include <string>

#include "gb2ss/errors.hpp"
#include "gb2ss/samplers.hpp"

namespace gb2ss {
namespace {

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

[[noreturn]] void rethrow_at(std::size_t t, const std::exception& e) {
  throw SamplerError("ffbs: period " + std::to_string(t + 1) + ": " + e.what());
}

}  // namespace

FilterMoments kalman_filter(const std::vector<LatentState>& H, const Vec4& mu,
                            const SymMatrix& omega, const SymMatrix& sigma,
                            const CovariatePanel& covs,
                            const Hyperparameters& hyper) {
  const std::size_t T = H.size();
  if (covs.periods() != T) {
    throw DimensionError("ffbs: latent path and covariates differ in length");
  }
  const Eigen::Index k = 4 * covs.dim();
  if (sigma.dim() != k || omega.dim() != 4 || hyper.beta0.size() != k) {
    throw DimensionError("ffbs: covariance dimensions do not match 4d");
  }
  FilterMoments out;
  out.m.reserve(T);
  out.C.reserve(T);
  VectorXd m = hyper.beta0;
  MatrixXd C = hyper.delta0.matrix();
  for (std::size_t t = 0; t < T; ++t) {
    try {
      const MatrixXd Z = design_matrix(covs.x(t));
      const VectorXd a = m;
      const MatrixXd R = C + sigma.matrix();
      const MatrixXd Q = symmetrize(Z * R * Z.transpose() + omega.matrix());
      Eigen::LLT<MatrixXd> llt(Q);
      if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite(0, "innovation covariance Q_t not PD");
      }
      // A_t = R Z' Q^{-1}
      const MatrixXd RZt = R * Z.transpose();
      const MatrixXd A = llt.solve(RZt.transpose()).transpose();
      const VectorXd innovation = H[t].h - mu - Z * a;
      m = a + A * innovation;
      C = symmetrize(R - A * Z * R);
    } catch (const std::exception& e) {
      rethrow_at(t, e);
    }
    out.m.push_back(m);
    out.C.push_back(C);
  }
  return out;
}

GaussianMoments backward_moments(const VectorXd& m_t, const MatrixXd& C_t,
                                 const SymMatrix& sigma,
                                 const VectorXd& beta_next) {
  const MatrixXd S = symmetrize(C_t + sigma.matrix());
  Eigen::LLT<MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(0, "C_t + Sigma not positive definite");
  }
  // G = C_t S^{-1}; S and C_t are symmetric so G' = S^{-1} C_t.
  const MatrixXd G = llt.solve(C_t).transpose();
  GaussianMoments out;
  out.mean = m_t + G * (beta_next - m_t);
  out.cov = SymMatrix(C_t - G * S * G.transpose());
  return out;
}

CoefficientPath ffbs(const std::vector<LatentState>& H, const Vec4& mu,
                     const SymMatrix& omega, const SymMatrix& sigma,
                     const CovariatePanel& covs, const Hyperparameters& hyper,
                     Rng& rng) {
  const FilterMoments f = kalman_filter(H, mu, omega, sigma, covs, hyper);
  const std::size_t T = H.size();
  CoefficientPath B(T);
  try {
    B[T - 1] = sample_mvn(f.m[T - 1], SymMatrix(f.C[T - 1]), rng,
                          Jitter::RetryOnce);
  } catch (const std::exception& e) {
    rethrow_at(T - 1, e);
  }
  for (std::size_t s = T - 1; s-- > 0;) {
    try {
      const GaussianMoments bm = backward_moments(f.m[s], f.C[s], sigma, B[s + 1]);
      B[s] = sample_mvn(bm.mean, bm.cov, rng, Jitter::RetryOnce);
    } catch (const std::exception& e) {
      rethrow_at(s, e);
    }
  }
  return B;
}

}  // namespace gb2ss
