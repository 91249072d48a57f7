#include "crossreg/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace crossreg {

const GaussLegendre10& GaussLegendre10::get() {
  static const GaussLegendre10 rule = [] {
    using G = boost::math::quadrature::gauss<double, 10>;
    GaussLegendre10 r{};
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    // Boost stores the nonnegative half of the symmetric rule.
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.nodes[k] = x[i];
      r.weights[k++] = w[i];
      r.nodes[k] = -x[i];
      r.weights[k++] = w[i];
    }
    return r;
  }();
  return rule;
}

}  // namespace crossreg
