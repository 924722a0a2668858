#include "uniconsist/normal.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>

#include "uniconsist/error.hpp"

namespace uniconsist {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw PreconditionError("normal_quantile: p must lie in (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double upper_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("alpha must lie in (0,1)");
  return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * alpha);
}

}  // namespace uniconsist
