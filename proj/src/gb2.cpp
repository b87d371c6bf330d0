#include "gb2ss/gb2.hpp"

#include <cmath>
#include <string>

#include "gb2ss/errors.hpp"
#include "gb2ss/quadrature.hpp"
#include "gb2ss/specfun.hpp"

namespace gb2ss {
namespace {

bool valid_component(double v) { return v > 0.0 && std::isfinite(v); }

// log(1 + e^t) without overflow.
double log1p_exp(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

void require_mean(const Gb2Params& theta, const char* fn) {
  if (!theta.has_mean()) {
    throw MomentError(std::string(fn) +
                      ": first moment does not exist (a*q <= 1)");
  }
}

constexpr std::size_t kGiniNodes = 256;

}  // namespace

Gb2Params::Gb2Params(double a, double b, double p, double q)
    : a_(a), b_(b), p_(p), q_(q) {
  if (!valid_component(a) || !valid_component(b) || !valid_component(p) ||
      !valid_component(q)) {
    throw DomainError("Gb2Params: a, b, p, q must be positive and finite");
  }
}

std::optional<Gb2Params> Gb2Params::from_log(const std::array<double, 4>& h) {
  Gb2Params theta;
  theta.a_ = std::exp(h[0]);
  theta.b_ = std::exp(h[1]);
  theta.p_ = std::exp(h[2]);
  theta.q_ = std::exp(h[3]);
  if (!valid_component(theta.a_) || !valid_component(theta.b_) ||
      !valid_component(theta.p_) || !valid_component(theta.q_)) {
    return std::nullopt;
  }
  return theta;
}

double log_pdf(const Gb2Params& theta, double x) {
  if (!(x > 0.0)) throw DomainError("log_pdf: x must be positive");
  const double a = theta.a(), p = theta.p(), q = theta.q();
  const double lx = std::log(x);
  const double lb = std::log(theta.b());
  return std::log(a) + (a * p - 1.0) * lx - a * p * lb - ln_beta(p, q) -
         (p + q) * log1p_exp(a * (lx - lb));
}

double pdf(const Gb2Params& theta, double x) {
  return std::exp(log_pdf(theta, x));
}

double cdf(const Gb2Params& theta, double x) {
  if (!(x >= 0.0)) throw DomainError("cdf: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double t = theta.a() * (std::log(x) - std::log(theta.b()));
  const double z = 1.0 / (1.0 + std::exp(-t));
  return reg_inc_beta(z, theta.p(), theta.q());
}

double survival(const Gb2Params& theta, double x) {
  if (!(x >= 0.0)) throw DomainError("survival: x must be non-negative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double t = theta.a() * (std::log(x) - std::log(theta.b()));
  const double zc = 1.0 / (1.0 + std::exp(t));
  return reg_inc_beta(zc, theta.q(), theta.p());
}

double quantile(const Gb2Params& theta, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("quantile: u must lie in (0, 1)");
  }
  const double z = inv_reg_inc_beta(u, theta.p(), theta.q());
  double ratio;
  if (z <= 0.5) {
    ratio = z / (1.0 - z);
  } else {
    // Upper half: invert the complement for precision in 1 - z.
    const double zc = inv_reg_inc_beta(1.0 - u, theta.q(), theta.p());
    ratio = (1.0 - zc) / zc;
  }
  return theta.b() * std::pow(ratio, 1.0 / theta.a());
}

double sample(const Gb2Params& theta, Rng& rng) {
  return quantile(theta, uniform_open(rng));
}

double mean(const Gb2Params& theta) {
  require_mean(theta, "mean");
  const double ia = 1.0 / theta.a();
  return theta.b() * std::exp(ln_beta(theta.p() + ia, theta.q() - ia) -
                              ln_beta(theta.p(), theta.q()));
}

double lorenz(const Gb2Params& theta, double u) {
  require_mean(theta, "lorenz");
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("lorenz: u must lie in [0, 1]");
  }
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  const double ia = 1.0 / theta.a();
  const double z = inv_reg_inc_beta(u, theta.p(), theta.q());
  return reg_inc_beta(z, theta.p() + ia, theta.q() - ia);
}

double gini(const Gb2Params& theta) {
  require_mean(theta, "gini");
  static const GaussLegendre rule(kGiniNodes);
  const double p = theta.p(), q = theta.q();
  const double ia = 1.0 / theta.a();
  const double lb_pq = ln_beta(p, q);
  const double p1 = p + ia, q1 = q - ia;
  const double lb_1 = ln_beta(p1, q1);
  double area = 0.0;
  double hint = p / (p + q);
  // Nodes are ascending in u, so each inversion starts from its neighbour.
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double u = rule.node01(i);
    const double z = detail::inv_reg_inc_beta(u, p, q, lb_pq, hint);
    hint = z;
    area += rule.weight01(i) * detail::reg_inc_beta(z, p1, q1, lb_1);
  }
  return 1.0 - 2.0 * area;
}

std::optional<double> try_gini(const Gb2Params& theta) {
  if (!theta.has_mean()) return std::nullopt;
  return gini(theta);
}

}  // namespace gb2ss
