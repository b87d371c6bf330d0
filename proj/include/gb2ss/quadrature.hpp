#ifndef GB2SS_QUADRATURE_HPP_
#define GB2SS_QUADRATURE_HPP_

#include <cstddef>
#include <vector>

namespace gb2ss {

// n-point Gauss-Legendre rule. Nodes/weights are computed once by Newton
// iteration on P_n and exposed both on [-1, 1] and mapped to [0, 1]
// (ascending order).
class GaussLegendre {
 public:
  explicit GaussLegendre(std::size_t n);

  std::size_t size() const { return nodes_.size(); }
  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double node01(std::size_t i) const { return 0.5 * (nodes_[i] + 1.0); }
  double weight01(std::size_t i) const { return 0.5 * weights_[i]; }

  template <class F>
  double integrate01(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += weight01(i) * f(node01(i));
    return s;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace gb2ss

#endif  // GB2SS_QUADRATURE_HPP_
