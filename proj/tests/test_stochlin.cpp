#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "gb2ss/errors.hpp"
#include "gb2ss/stochlin.hpp"
#include "oracles.hpp"

using namespace gb2ss;

namespace {

MatrixXd mat2(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

double rel_frob(const MatrixXd& est, const MatrixXd& truth) {
  return (est - truth).norm() / truth.norm();
}

template <class Draw>
MatrixXd sample_cov(Draw draw, int n, Eigen::Index dim) {
  VectorXd mean = VectorXd::Zero(dim);
  MatrixXd m2 = MatrixXd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    const VectorXd x = draw();
    mean += x;
    m2 += x * x.transpose();
  }
  mean /= n;
  return m2 / n - mean * mean.transpose();
}

// Closed-form multivariate t log density.
double mvt_oracle(const VectorXd& x, const VectorXd& mu, const MatrixXd& s, double nu) {
  const double k = static_cast<double>(x.size());
  const VectorXd d = x - mu;
  const double quad = d.dot(s.inverse() * d);
  return boost::math::lgamma((nu + k) / 2) - boost::math::lgamma(nu / 2) -
         0.5 * k * std::log(nu * M_PI) - 0.5 * std::log(s.determinant()) -
         0.5 * (nu + k) * std::log1p(quad / nu);
}

}  // namespace

TEST_CASE("SymMatrix symmetrizes its input") {
  const SymMatrix s(mat2(1, 2, 4, 3));
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
  CHECK(SymMatrix::identity(3, 2.0).matrix() == 2.0 * MatrixXd::Identity(3, 3));
}

TEST_CASE("cholesky examples") {
  CHECK(cholesky(SymMatrix::identity(3)) == MatrixXd::Identity(3, 3));
  const MatrixXd l = cholesky(SymMatrix(mat2(4, 2, 2, 3)));
  CHECK(l(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(l(0, 1) == 0.0);
  CHECK(l(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(cholesky(SymMatrix(mat2(1, 2, 2, 1))), NotPositiveDefinite);
}

TEST_CASE("cholesky reports the failing pivot") {
  MatrixXd m = MatrixXd::Identity(4, 4);
  m(2, 2) = -1.0;
  try {
    cholesky(SymMatrix(m));
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.pivot() == 2);
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }
  try {
    cholesky(SymMatrix(mat2(1, 2, 2, 1)));
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.pivot() == 1);
  }
}

TEST_CASE("jitter retry rescues a singular PSD matrix once") {
  const SymMatrix singular(mat2(1, 1, 1, 1));
  CHECK_THROWS_AS(cholesky(singular), NotPositiveDefinite);
  const MatrixXd l = cholesky(singular, Jitter::RetryOnce);
  CHECK(((l * l.transpose()) - singular.matrix()).cwiseAbs().maxCoeff() <= 1e-7);
  CHECK_THROWS_AS(cholesky(SymMatrix(mat2(1, 2, 2, 1)), Jitter::RetryOnce),
                  NotPositiveDefinite);
}

TEST_CASE("cholesky round trip on random PD matrices") {
  std::mt19937_64 rng(11);
  for (Eigen::Index n = 1; n <= 12; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const MatrixXd a = oracle::random_pd(n, rng);
      const MatrixXd l = cholesky(SymMatrix(a));
      CHECK(l.isLowerTriangular());
      const double err = (l * l.transpose() - a).cwiseAbs().rowwise().sum().maxCoeff();
      const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
      CHECK(err <= 1e-10 * norm);
    }
  }
}

TEST_CASE("inverse, log determinant and condition number") {
  std::mt19937_64 rng(12);
  for (Eigen::Index n : {1, 2, 4, 8}) {
    const MatrixXd a = oracle::random_pd(n, rng);
    const SymMatrix s(a);
    CHECK((inverse_pd(s).matrix() * a - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <=
          1e-10);
    CHECK(log_det_pd(s) == doctest::Approx(std::log(a.determinant())).epsilon(1e-11));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
    CHECK(condition_number(s) ==
          doctest::Approx(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff())
              .epsilon(1e-9));
  }
  CHECK(condition_number(SymMatrix(mat2(1, 2, 2, 1))) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("Gaussian log density against the direct formula") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> z;
  for (Eigen::Index n : {1, 3, 4, 8}) {
    const MatrixXd cov = oracle::random_pd(n, rng);
    VectorXd x(n), mu(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = z(rng);
      mu[i] = z(rng);
    }
    const SymMatrix prec(cov.inverse());
    const double want = oracle::mvn_logpdf(x, mu, cov);
    CHECK(mvn_log_density_precision(x, mu, prec) == doctest::Approx(want).epsilon(1e-10));
    const GaussianLogDensity g(mu, prec);
    CHECK(g(x) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("sample_mvn") {
  const VectorXd mean = (VectorXd(3) << 1.0, -2.0, 0.5).finished();
  Rng rng(1);
  const VectorXd x = sample_mvn(mean, SymMatrix::identity(3, 1e-30), rng);
  CHECK((x - mean).cwiseAbs().maxCoeff() <= 1e-10);

  Rng r1(99), r2(99);
  const SymMatrix cov(mat2(2.0, 0.6, 0.6, 1.0));
  CHECK(sample_mvn(mean.head(2), cov, r1) == sample_mvn(mean.head(2), cov, r2));

  Rng r3(3);
  const MatrixXd est = sample_cov(
      [&] { return sample_mvn(VectorXd::Zero(2), cov, r3); }, 100000, 2);
  CHECK(rel_frob(est, cov.matrix()) <= 0.05);

  CHECK_THROWS_AS(sample_mvn(mean.head(2), SymMatrix(mat2(1, 2, 2, 1)), r3),
                  NotPositiveDefinite);
}

TEST_CASE("mvt density examples") {
  const VectorXd zero = VectorXd::Zero(1);
  CHECK(std::exp(mvt_log_density(zero, zero, SymMatrix::identity(1), 1.0)) ==
        doctest::Approx(1.0 / M_PI).epsilon(1e-12));

  std::mt19937_64 rng(14);
  std::normal_distribution<double> z;
  for (Eigen::Index n : {1, 2, 4}) {
    const MatrixXd s = oracle::random_pd(n, rng, 0.5);
    VectorXd mu(n), v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      mu[i] = z(rng);
      v[i] = z(rng);
    }
    for (double nu : {1.0, 4.5, 15.0}) {
      const SymMatrix sc(s);
      const double plus = mvt_log_density(mu + v, mu, sc, nu);
      CHECK(std::fabs(plus - mvt_log_density(mu - v, mu, sc, nu)) <= 1e-12);
      CHECK(plus == doctest::Approx(mvt_oracle(mu + v, mu, s, nu)).epsilon(1e-11));
      CHECK(mvt_log_density_chol(mu + v, mu, cholesky(sc), nu) ==
            doctest::Approx(plus).epsilon(1e-14));
    }
  }
}

TEST_CASE("mvt density integrates to one in one dimension") {
  const VectorXd mu = VectorXd::Constant(1, 0.3);
  for (double nu : {1.0, 3.0, 15.0}) {
    for (double s2 : {0.25, 2.0}) {
      const SymMatrix sc = SymMatrix::identity(1, s2);
      auto f = [&](double x) {
        return std::exp(mvt_log_density(VectorXd::Constant(1, x), mu, sc, nu));
      };
      const double inf = std::numeric_limits<double>::infinity();
      CHECK(oracle::integrate(f, -inf, inf, 1e-10) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("sample_mvt covariance") {
  const SymMatrix scale(mat2(1.5, -0.4, -0.4, 0.8));
  const double nu = 30.0;
  Rng rng(5);
  const MatrixXd est = sample_cov(
      [&] { return sample_mvt(VectorXd::Zero(2), scale, nu, rng); }, 100000, 2);
  CHECK(rel_frob(est, scale.matrix() * nu / (nu - 2.0)) <= 0.05);

  Rng r1(6), r2(6);
  const VectorXd m = VectorXd::Ones(2);
  CHECK(sample_mvt(m, scale, 15.0, r1) == sample_mvt_chol(m, cholesky(scale), 15.0, r2));
}

TEST_CASE("Wishart mean and positive definiteness") {
  const SymMatrix s(mat2(2.0, 0.5, 0.5, 1.0));
  Rng rng(7);
  MatrixXd sum = MatrixXd::Zero(2, 2);
  const int n = 100000;
  bool all_pd = true;
  for (int i = 0; i < n; ++i) {
    const SymMatrix w = sample_wishart(5.0, s, rng);
    sum += w.matrix();
    if (i % 100 == 0) {
      try {
        cholesky(w);
      } catch (const NotPositiveDefinite&) {
        all_pd = false;
      }
    }
  }
  CHECK(all_pd);
  CHECK(rel_frob(sum / n, 5.0 * s.matrix()) <= 0.03);

  Rng r4(8);
  const SymMatrix s4(oracle::random_pd(4, r4));
  MatrixXd sum4 = MatrixXd::Zero(4, 4);
  for (int i = 0; i < 20000; ++i) sum4 += sample_wishart(7.5, s4, r4).matrix();
  CHECK(rel_frob(sum4 / 20000.0, 7.5 * s4.matrix()) <= 0.03);
}

TEST_CASE("one-dimensional Wishart is a gamma variate") {
  const double dof = 5.0, s = 0.7;
  const double shape = dof / 2.0, scale = 2.0 * s;
  Rng rng(9);
  const int n = 100000;
  std::vector<double> draws(n);
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    draws[i] = sample_wishart(dof, SymMatrix::identity(1, s), rng)(0, 0);
    mean += draws[i];
  }
  mean /= n;
  CHECK(mean == doctest::Approx(shape * scale).epsilon(0.01));

  // Histogram against gamma cell probabilities, each within 5 standard errors.
  const int bins = 20;
  const double width = 4.0 * shape * scale / bins;
  std::vector<int> counts(bins + 1, 0);
  for (double d : draws) {
    const int b = static_cast<int>(d / width);
    ++counts[std::min(b, bins)];
  }
  for (int b = 0; b < bins; ++b) {
    const double prob = boost::math::gamma_p(shape, (b + 1) * width / scale) -
                        boost::math::gamma_p(shape, b * width / scale);
    const double se = std::sqrt(prob * (1 - prob) / n);
    CHECK(std::fabs(counts[b] / static_cast<double>(n) - prob) <= 5.0 * se);
  }
}
