#ifndef GB2SS_SPECFUN_HPP_
#define GB2SS_SPECFUN_HPP_

// Scalar special functions behind the GB2 density, CDF and Lorenz curve.
// All functions are pure and throw gb2ss::DomainError outside their domain.

namespace gb2ss {

// log Gamma(x), x > 0.
double ln_gamma(double x);

// log B(p, q) = ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q).
double ln_beta(double p, double q);

// Regularized incomplete beta I_z(p, q), 0 <= z <= 1.
double reg_inc_beta(double z, double p, double q);

// Inverse of z -> I_z(p, q). Newton iterations safeguarded by bisection,
// started at the mean p / (p + q).
double inv_reg_inc_beta(double u, double p, double q);

namespace detail {

// Unchecked variants for hot loops; ln_beta_pq must equal ln_beta(p, q).
double reg_inc_beta(double z, double p, double q, double ln_beta_pq);

// Both tails I_z(p, q) and I_{1-z}(q, p) from one continued fraction, the
// smaller without cancellation. zc must equal 1 - z, computed independently.
struct BetaTails {
  double lower;
  double upper;
};
BetaTails reg_inc_beta_tails(double z, double zc, double p, double q,
                             double ln_beta_pq);

// Start the inverse at `hint` instead of the mean (used when inverting at a
// monotone sequence of targets).
double inv_reg_inc_beta(double u, double p, double q, double ln_beta_pq,
                        double hint);

}  // namespace detail
}  // namespace gb2ss

#endif  // GB2SS_SPECFUN_HPP_
