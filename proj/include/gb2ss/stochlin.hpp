#ifndef GB2SS_STOCHLIN_HPP_
#define GB2SS_STOCHLIN_HPP_

#include <Eigen/Dense>

#include "gb2ss/rng.hpp"

namespace gb2ss {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dense symmetric matrix. Symmetry is exact by construction: the input is
// replaced by (A + A') / 2.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const MatrixXd& m);

  static SymMatrix identity(Eigen::Index n, double scale = 1.0);

  Eigen::Index dim() const { return m_.rows(); }
  const MatrixXd& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  bool empty() const { return m_.size() == 0; }

 private:
  MatrixXd m_;
};

// Retry policy for Cholesky factorizations requested from inside a sampler.
// RetryOnce adds 1e-8 * mean(diag) * I once before giving up.
enum class Jitter { None, RetryOnce };

// Lower-triangular L with L L' = A. Throws NotPositiveDefinite naming the
// failing pivot.
MatrixXd cholesky(const SymMatrix& a, Jitter jitter = Jitter::None);

SymMatrix inverse_pd(const SymMatrix& a, Jitter jitter = Jitter::None);
double log_det_pd(const SymMatrix& a);
// Largest over smallest eigenvalue; +inf unless positive definite.
double condition_number(const SymMatrix& a);

VectorXd sample_mvn(const VectorXd& mean, const SymMatrix& cov, Rng& rng,
                    Jitter jitter = Jitter::None);
VectorXd sample_mvn_chol(const VectorXd& mean, const MatrixXd& chol_lower,
                         Rng& rng);

// Gaussian log density at x with the given precision matrix.
double mvn_log_density_precision(const VectorXd& x, const VectorXd& mean,
                                 const SymMatrix& precision);

// Gaussian log density with the normalizing constant precomputed, for
// repeated evaluation against a fixed mean and precision.
class GaussianLogDensity {
 public:
  GaussianLogDensity(VectorXd mean, SymMatrix precision);
  double operator()(const VectorXd& x) const;
  const VectorXd& mean() const { return mean_; }
  const SymMatrix& precision() const { return precision_; }

 private:
  VectorXd mean_;
  SymMatrix precision_;
  double log_norm_ = 0.0;
};

// Multivariate t with location `mean`, scale matrix `scale` (not the
// covariance) and `dof` degrees of freedom.
VectorXd sample_mvt(const VectorXd& mean, const SymMatrix& scale, double dof,
                    Rng& rng);
double mvt_log_density(const VectorXd& x, const VectorXd& mean,
                       const SymMatrix& scale, double dof);

// Same, with a precomputed Cholesky factor of the scale matrix.
VectorXd sample_mvt_chol(const VectorXd& mean, const MatrixXd& chol_lower,
                         double dof, Rng& rng);
double mvt_log_density_chol(const VectorXd& x, const VectorXd& mean,
                            const MatrixXd& chol_lower, double dof);

// Wishart(dof, scale) by the Bartlett construction; E[W] = dof * scale.
SymMatrix sample_wishart(double dof, const SymMatrix& scale, Rng& rng);

}  // namespace gb2ss

#endif  // GB2SS_STOCHLIN_HPP_
