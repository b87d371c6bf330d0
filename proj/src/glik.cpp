#include "gb2ss/glik.hpp"

#include <cmath>
#include <string>

#include "gb2ss/errors.hpp"
#include "gb2ss/specfun.hpp"

namespace gb2ss {
namespace {

constexpr double kMinIncrement = 1e-300;
// exp(200) ~ 7e86; beyond this the special functions lose all meaning.
constexpr double kMaxAbsLogParam = 200.0;

double log1p_exp(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double ln_factorial(std::int64_t n) {
  return n <= 1 ? 0.0 : ln_gamma(static_cast<double>(n) + 1.0);
}

}  // namespace

GroupedObservation::GroupedObservation(std::vector<double> thresholds,
                                       std::vector<std::int64_t> counts)
    : thresholds_(std::move(thresholds)), counts_(std::move(counts)) {
  if (counts_.empty()) {
    throw DataError("grouped observation: at least one count is required");
  }
  if (thresholds_.size() + 1 != counts_.size()) {
    throw DataError("grouped observation: expected " +
                    std::to_string(counts_.size() - 1) +
                    " thresholds for " + std::to_string(counts_.size()) +
                    " counts, got " + std::to_string(thresholds_.size()));
  }
  for (std::size_t k = 0; k < thresholds_.size(); ++k) {
    const double y = thresholds_[k];
    if (!(y > 0.0) || !std::isfinite(y)) {
      throw DataError("grouped observation: threshold " + std::to_string(k + 1) +
                      " must be positive and finite");
    }
    if (k > 0 && !(y > thresholds_[k - 1])) {
      throw DataError("grouped observation: thresholds must be strictly "
                      "increasing (threshold " +
                      std::to_string(k + 1) + ")");
    }
    log_thresholds_.push_back(std::log(y));
  }
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    if (counts_[k] < 1) {
      throw DataError("grouped observation: count " + std::to_string(k + 1) +
                      " must be >= 1");
    }
    total_ += counts_[k];
  }
  const std::size_t groups = counts_.size();
  log_constant_ = ln_factorial(total_) - ln_factorial(counts_[groups - 1]);
  if (groups > 1) {
    for (std::size_t k = 0; k + 1 < groups; ++k) {
      log_constant_ -= ln_factorial(counts_[k] - 1);
    }
  } else {
    // K = 1: n! (1 - F(0))^n / n! = 1.
    log_constant_ = 0.0;
  }
}

double log_grouped_likelihood(const Gb2Params& theta,
                              const GroupedObservation& obs) {
  const std::size_t groups = obs.groups();
  if (groups == 1) return 0.0;
  const double a = theta.a(), p = theta.p(), q = theta.q();
  const double lb = std::log(theta.b());
  const double lbeta = ln_beta(p, q);
  const double log_pdf_const = std::log(a) - a * p * lb - lbeta;
  const auto& counts = obs.counts();
  const auto& ly = obs.log_thresholds();

  double total = obs.log_constant();
  detail::BetaTails prev{0.0, 1.0};
  for (std::size_t k = 0; k + 1 < groups; ++k) {
    const double t = a * (ly[k] - lb);
    const auto cur = detail::reg_inc_beta_tails(
        1.0 / (1.0 + std::exp(-t)), 1.0 / (1.0 + std::exp(t)), p, q, lbeta);
    // Differences of whichever tail is small at the upper end.
    const double inc = cur.lower <= 0.5 ? cur.lower - prev.lower
                                        : prev.upper - cur.upper;
    if (!(inc > kMinIncrement)) return kLogZero;
    total += static_cast<double>(counts[k] - 1) * std::log(inc);
    total += log_pdf_const + (a * p - 1.0) * ly[k] - (p + q) * log1p_exp(t);
    prev = cur;
  }
  if (!(prev.upper > kMinIncrement)) return kLogZero;
  total += static_cast<double>(counts[groups - 1]) * std::log(prev.upper);
  return std::isfinite(total) ? total : kLogZero;
}

double log_grouped_likelihood(const LatentState& h,
                              const GroupedObservation& obs) {
  if (h.h.cwiseAbs().maxCoeff() > kMaxAbsLogParam) return kLogZero;
  const auto theta = h.theta();
  if (!theta) return kLogZero;
  return log_grouped_likelihood(*theta, obs);
}

}  // namespace gb2ss
