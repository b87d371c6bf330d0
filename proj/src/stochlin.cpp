#include "gb2ss/stochlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "gb2ss/errors.hpp"
#include "gb2ss/specfun.hpp"

namespace gb2ss {
namespace {

bool try_cholesky(const MatrixXd& a, MatrixXd& l, Eigen::Index& failed) {
  const Eigen::Index n = a.rows();
  l.setZero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) {
      failed = j;
      return false;
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return true;
}

double chi_square(double dof, Rng& rng) {
  std::gamma_distribution<double> g(0.5 * dof, 2.0);
  return g(rng);
}

}  // namespace

SymMatrix::SymMatrix(const MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("SymMatrix: matrix must be square");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index n, double scale) {
  return SymMatrix(scale * MatrixXd::Identity(n, n));
}

MatrixXd cholesky(const SymMatrix& a, Jitter jitter) {
  MatrixXd l;
  Eigen::Index failed = 0;
  if (try_cholesky(a.matrix(), l, failed)) return l;
  if (jitter == Jitter::RetryOnce && a.dim() > 0) {
    const double eps = 1e-8 * a.matrix().diagonal().mean();
    MatrixXd shifted = a.matrix();
    shifted.diagonal().array() += std::max(eps, 1e-300);
    if (try_cholesky(shifted, l, failed)) return l;
  }
  throw NotPositiveDefinite(
      static_cast<std::size_t>(failed),
      "cholesky: matrix not positive definite (pivot " +
          std::to_string(failed) + ")");
}

SymMatrix inverse_pd(const SymMatrix& a, Jitter jitter) {
  const MatrixXd l = cholesky(a, jitter);
  const MatrixXd linv =
      l.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(a.dim(), a.dim()));
  return SymMatrix(linv.transpose() * linv);
}

double log_det_pd(const SymMatrix& a) {
  const MatrixXd l = cholesky(a);
  return 2.0 * l.diagonal().array().log().sum();
}

double condition_number(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a.matrix(), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

VectorXd sample_mvn_chol(const VectorXd& mean, const MatrixXd& chol_lower,
                         Rng& rng) {
  VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
  return mean + chol_lower.triangularView<Eigen::Lower>() * z;
}

VectorXd sample_mvn(const VectorXd& mean, const SymMatrix& cov, Rng& rng,
                    Jitter jitter) {
  if (cov.dim() != mean.size()) {
    throw DimensionError("sample_mvn: mean and covariance sizes differ");
  }
  return sample_mvn_chol(mean, cholesky(cov, jitter), rng);
}

double mvn_log_density_precision(const VectorXd& x, const VectorXd& mean,
                                 const SymMatrix& precision) {
  if (x.size() != mean.size() || precision.dim() != x.size()) {
    throw DimensionError("mvn_log_density_precision: dimension mismatch");
  }
  const VectorXd r = x - mean;
  const double quad = r.dot(precision.matrix() * r);
  const double k = static_cast<double>(x.size());
  return -0.5 * k * std::log(2.0 * std::numbers::pi) +
         0.5 * log_det_pd(precision) - 0.5 * quad;
}

GaussianLogDensity::GaussianLogDensity(VectorXd mean, SymMatrix precision)
    : mean_(std::move(mean)), precision_(std::move(precision)) {
  if (precision_.dim() != mean_.size()) {
    throw DimensionError("GaussianLogDensity: dimension mismatch");
  }
  log_norm_ = -0.5 * static_cast<double>(mean_.size()) *
                  std::log(2.0 * std::numbers::pi) +
              0.5 * log_det_pd(precision_);
}

double GaussianLogDensity::operator()(const VectorXd& x) const {
  const VectorXd r = x - mean_;
  return log_norm_ - 0.5 * r.dot(precision_.matrix() * r);
}

VectorXd sample_mvt_chol(const VectorXd& mean, const MatrixXd& chol_lower,
                         double dof, Rng& rng) {
  VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
  const double g = chi_square(dof, rng);
  return mean + (chol_lower.triangularView<Eigen::Lower>() * z) *
                    std::sqrt(dof / g);
}

VectorXd sample_mvt(const VectorXd& mean, const SymMatrix& scale, double dof,
                    Rng& rng) {
  if (scale.dim() != mean.size()) {
    throw DimensionError("sample_mvt: mean and scale sizes differ");
  }
  if (!(dof > 0.0)) throw DomainError("sample_mvt: dof must be positive");
  return sample_mvt_chol(mean, cholesky(scale), dof, rng);
}

double mvt_log_density_chol(const VectorXd& x, const VectorXd& mean,
                            const MatrixXd& chol_lower, double dof) {
  const double k = static_cast<double>(x.size());
  const VectorXd w =
      chol_lower.triangularView<Eigen::Lower>().solve(VectorXd(x - mean));
  const double delta = w.squaredNorm();
  const double log_det = 2.0 * chol_lower.diagonal().array().log().sum();
  return ln_gamma(0.5 * (dof + k)) - ln_gamma(0.5 * dof) -
         0.5 * k * std::log(dof * std::numbers::pi) - 0.5 * log_det -
         0.5 * (dof + k) * std::log1p(delta / dof);
}

double mvt_log_density(const VectorXd& x, const VectorXd& mean,
                       const SymMatrix& scale, double dof) {
  if (x.size() != mean.size() || scale.dim() != x.size()) {
    throw DimensionError("mvt_log_density: dimension mismatch");
  }
  if (!(dof > 0.0)) throw DomainError("mvt_log_density: dof must be positive");
  return mvt_log_density_chol(x, mean, cholesky(scale), dof);
}

SymMatrix sample_wishart(double dof, const SymMatrix& scale, Rng& rng) {
  const Eigen::Index n = scale.dim();
  if (!(dof > static_cast<double>(n) - 1.0)) {
    throw DomainError("sample_wishart: dof must exceed dim - 1");
  }
  const MatrixXd l = cholesky(scale);
  MatrixXd a = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = std::sqrt(chi_square(dof - static_cast<double>(i), rng));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = standard_normal(rng);
  }
  const MatrixXd la = l * a;
  return SymMatrix(la * la.transpose());
}

}  // namespace gb2ss
