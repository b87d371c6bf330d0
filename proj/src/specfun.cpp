#include "gb2ss/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "gb2ss/errors.hpp"

namespace gb2ss {
namespace {

using NoPromote =
    boost::math::policies::policy<boost::math::policies::promote_double<false>>;

constexpr double kTiny = 1e-300;
constexpr double kCfEps = 1e-16;
constexpr int kCfMaxIter = 20000;

void require_shape(double p, double q, const char* fn) {
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw DomainError(std::string(fn) +
                      ": shape parameters must be positive and finite");
  }
}

// Modified Lentz evaluation of the continued fraction for I_z(p, q); valid
// (fast converging) for z < (p + 1) / (p + q + 2).
double beta_cf(double z, double p, double q) {
  const double qab = p + q;
  const double qap = p + 1.0;
  const double qam = p - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * z / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (q - m) * z / ((qam + m2) * (p + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(p + m) * (qab + m) * z / ((p + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kCfEps) return h;
  }
  return h;
}

// Bracket midpoint. Deep tails are approached geometrically (in z near 0, in
// 1 - z near 1) so extreme quantiles are reached in a few dozen steps.
double bisect(double lo, double hi) {
  const double dlo = 1.0 - lo;
  const double dhi = 1.0 - hi;
  if (lo == 0.0 && hi < 1e-3) return hi * 1e-3;
  if (hi == 1.0 && dlo < 1e-3) return 1.0 - dlo * 1e-3;
  if (lo > 0.0 && hi / lo > 1e3) return std::sqrt(lo * hi);
  if (dhi > 0.0 && dlo / dhi > 1e3) return 1.0 - std::sqrt(dlo * dhi);
  return 0.5 * (lo + hi);
}

}  // namespace

double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("ln_gamma: argument must be positive and finite");
  }
  return boost::math::lgamma(x, NoPromote());
}

double ln_beta(double p, double q) {
  require_shape(p, q, "ln_beta");
  return ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q);
}

double reg_inc_beta(double z, double p, double q) {
  require_shape(p, q, "reg_inc_beta");
  if (!(z >= 0.0 && z <= 1.0)) {
    throw DomainError("reg_inc_beta: z must lie in [0, 1]");
  }
  return detail::reg_inc_beta(z, p, q, ln_beta(p, q));
}

double inv_reg_inc_beta(double u, double p, double q) {
  require_shape(p, q, "inv_reg_inc_beta");
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("inv_reg_inc_beta: u must lie in [0, 1]");
  }
  return detail::inv_reg_inc_beta(u, p, q, ln_beta(p, q), p / (p + q));
}

namespace detail {

double reg_inc_beta(double z, double p, double q, double ln_beta_pq) {
  if (z <= 0.0) return 0.0;
  if (z >= 1.0) return 1.0;
  const double log_front = p * std::log(z) + q * std::log1p(-z) - ln_beta_pq;
  const double front = std::exp(log_front);
  if (z < (p + 1.0) / (p + q + 2.0)) {
    return std::clamp(front * beta_cf(z, p, q) / p, 0.0, 1.0);
  }
  return std::clamp(1.0 - front * beta_cf(1.0 - z, q, p) / q, 0.0, 1.0);
}

BetaTails reg_inc_beta_tails(double z, double zc, double p, double q,
                             double ln_beta_pq) {
  if (z <= 0.0) return {0.0, 1.0};
  if (zc <= 0.0) return {1.0, 0.0};
  const double front =
      std::exp(p * std::log(z) + q * std::log(zc) - ln_beta_pq);
  if (z < (p + 1.0) / (p + q + 2.0)) {
    const double lo = std::clamp(front * beta_cf(z, p, q) / p, 0.0, 1.0);
    return {lo, 1.0 - lo};
  }
  const double up = std::clamp(front * beta_cf(zc, q, p) / q, 0.0, 1.0);
  return {1.0 - up, up};
}

double inv_reg_inc_beta(double u, double p, double q, double ln_beta_pq,
                        double hint) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  // Newton on the log of the smaller tail against the log of its distance
  // from the boundary; the tails are close to power laws in those variables.
  const bool lower = u <= 0.5;
  const double log_target = lower ? std::log(u) : std::log1p(-u);
  double lo = 0.0;
  double hi = 1.0;
  double z = (hint > 0.0 && hint < 1.0) ? hint : p / (p + q);
  for (int iter = 0; iter < 400; ++iter) {
    const double zc = 1.0 - z;
    const BetaTails tails = reg_inc_beta_tails(z, zc, p, q, ln_beta_pq);
    const double tail = lower ? tails.lower : tails.upper;
    const double g = std::log(tail) - log_target;
    if (g == 0.0) return z;
    if ((lower && g < 0.0) || (!lower && g > 0.0)) {
      lo = z;
    } else {
      hi = z;
    }
    const double log_dens =
        (p - 1.0) * std::log(z) + (q - 1.0) * std::log1p(-z) - ln_beta_pq;
    double next;
    if (lower) {
      const double slope = std::exp(log_dens + std::log(z) - std::log(tail));
      next = z * std::exp(-g / slope);
    } else {
      const double slope = std::exp(log_dens + std::log(zc) - std::log(tail));
      next = 1.0 - zc * std::exp(-g / slope);
    }
    if (!(tail > 0.0) || !std::isfinite(next) || next <= lo || next >= hi) {
      next = bisect(lo, hi);
    }
    if (std::fabs(next - z) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(std::min(z, 1.0 - z), 1e-300)) {
      return next;
    }
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() *
                       std::max(lo, 1e-300)) {
      return next;
    }
    z = next;
  }
  return z;
}

}  // namespace detail
}  // namespace gb2ss
