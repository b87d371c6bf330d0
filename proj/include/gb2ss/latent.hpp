#ifndef GB2SS_LATENT_HPP_
#define GB2SS_LATENT_HPP_

#include <optional>

#include <Eigen/Dense>

#include "gb2ss/gb2.hpp"

namespace gb2ss {

using Vec4 = Eigen::Vector4d;

// Log GB2 parameters for one period: h = (ln a, ln b, ln p, ln q).
struct LatentState {
  Vec4 h = Vec4::Zero();

  LatentState() = default;
  explicit LatentState(const Vec4& v) : h(v) {}

  std::optional<Gb2Params> theta() const {
    return Gb2Params::from_log({h[0], h[1], h[2], h[3]});
  }

  static LatentState from_theta(const Gb2Params& t) {
    return LatentState(
        Vec4(std::log(t.a()), std::log(t.b()), std::log(t.p()), std::log(t.q())));
  }
};

}  // namespace gb2ss

#endif  // GB2SS_LATENT_HPP_
