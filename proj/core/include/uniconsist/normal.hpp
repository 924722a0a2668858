#pragma once

namespace uniconsist {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double x);
double normal_quantile(double p);
// x_alpha with 1 - Phi(x_alpha) = alpha.
double upper_quantile(double alpha);

}  // namespace uniconsist
