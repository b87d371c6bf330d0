#ifndef GB2SS_GLIK_HPP_
#define GB2SS_GLIK_HPP_

#include <cstdint>
#include <limits>
#include <vector>

#include "gb2ss/gb2.hpp"
#include "gb2ss/latent.hpp"

namespace gb2ss {

// Log-likelihood value for configurations with zero probability at floating
// precision.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// One period of grouped data: K-1 strictly increasing positive thresholds
// (the selected order statistics y_[1..K-1]) and K bin counts n_1..n_K >= 1.
class GroupedObservation {
 public:
  GroupedObservation(std::vector<double> thresholds,
                     std::vector<std::int64_t> counts);

  const std::vector<double>& thresholds() const { return thresholds_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::size_t groups() const { return counts_.size(); }
  std::int64_t total() const { return total_; }

  // ln n! - sum_{k<K} ln (n_k - 1)! - ln n_K!
  double log_constant() const { return log_constant_; }
  const std::vector<double>& log_thresholds() const { return log_thresholds_; }

 private:
  std::vector<double> thresholds_;
  std::vector<std::int64_t> counts_;
  std::vector<double> log_thresholds_;
  std::int64_t total_ = 0;
  double log_constant_ = 0.0;
};

// Joint log density of the selected order statistics and bin counts. The
// factorial constants are kept. Returns kLogZero if a probability increment
// underflows (<= 1e-300), or when exp(h) is not a valid parameter vector
// (including |h_i| > 200).
double log_grouped_likelihood(const Gb2Params& theta,
                              const GroupedObservation& obs);
double log_grouped_likelihood(const LatentState& h,
                              const GroupedObservation& obs);

}  // namespace gb2ss

#endif  // GB2SS_GLIK_HPP_
