#ifndef GB2SS_GB2_HPP_
#define GB2SS_GB2_HPP_

#include <array>
#include <optional>

#include "gb2ss/rng.hpp"

namespace gb2ss {

// Parameters of the generalized beta distribution of the second kind.
// a: tail sharpness, b: scale (income units), p: lower-tail shape,
// q: upper-tail shape. All four are strictly positive and finite.
class Gb2Params {
 public:
  Gb2Params(double a, double b, double p, double q);

  // theta = exp(h); nullopt if any component is not a valid parameter.
  static std::optional<Gb2Params> from_log(const std::array<double, 4>& h);

  double a() const { return a_; }
  double b() const { return b_; }
  double p() const { return p_; }
  double q() const { return q_; }
  std::array<double, 4> as_array() const { return {a_, b_, p_, q_}; }

  // True when the first moment exists (a * q > 1).
  bool has_mean() const { return a_ * q_ > 1.0; }

  friend bool operator==(const Gb2Params&, const Gb2Params&) = default;

 private:
  Gb2Params() = default;
  double a_ = 1.0;
  double b_ = 1.0;
  double p_ = 1.0;
  double q_ = 1.0;
};

double log_pdf(const Gb2Params& theta, double x);
double pdf(const Gb2Params& theta, double x);

// F(x) = I_z(p, q) with z = (x/b)^a / (1 + (x/b)^a).
double cdf(const Gb2Params& theta, double x);
// 1 - F(x), evaluated as I_{1-z}(q, p) so the upper tail keeps precision.
double survival(const Gb2Params& theta, double x);

double quantile(const Gb2Params& theta, double u);
double sample(const Gb2Params& theta, Rng& rng);

// Throw MomentError unless a * q > 1.
double mean(const Gb2Params& theta);
double lorenz(const Gb2Params& theta, double u);
double gini(const Gb2Params& theta);

// gini() for callers that treat a missing first moment as "no value".
std::optional<double> try_gini(const Gb2Params& theta);

}  // namespace gb2ss

#endif  // GB2SS_GB2_HPP_
