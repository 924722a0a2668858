#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uniconsist/report.hpp"
#include "uniconsist/signal.hpp"

namespace uniconsist {

// Cell index floor(x m), clamped to m-1. Points on l/m land in the right cell.
std::size_t chi2_cell(double x, std::size_t m) noexcept;
std::vector<std::size_t> chi2_counts(std::span<const double> points, std::size_t m);

// n m sum_l (p^_l - 1/m)^2
double chi2_statistic(std::span<const double> points, std::size_t m);
double chi2_statistic_from_counts(std::span<const std::size_t> counts, std::size_t n);
// Classical Pearson form sum (N_l - n/m)^2 / (n/m).
double pearson_statistic(std::span<const double> points, std::size_t m);

// sum_l (int_{l/m}^{(l+1)/m} f)^2
double chi2_cell_mass_sq(const SignalSpec& signal, std::size_t m);
// T_n(F) = n m sum_l (int_cell f)^2
double chi2_population(const SignalSpec& signal, std::size_t m, std::size_t n);

// Fourier double series for sum_l (int_cell f)^2 over |k| <= K_max. The default
// K_max = ceil(2J/m) covers every pair with both indices in the support, so the
// truncation is exact for band-limited input.
double chi2_fourier_identity(const ComplexCoeffs& theta, std::size_t m, std::optional<std::size_t> K_max = std::nullopt);

// Measured constant C in sum_l(int f)^2 / m <= C m^{-1} i_n^{-1} sum |theta_j|^2
// for theta supported on |j| > i_n; the left side is m^{-1} sum_l (int f)^2.
double lch2_constant(const SignalSpec& tail_signal, std::size_t m, double i_n);

// ||f - Pi f|| for the projection on piecewise constants over m cells.
double projection_residual(const SignalSpec& signal, std::size_t m);
// 4 pi (k/m)^{1/2} ||f||
double projection_residual_bound(const SignalSpec& signal, std::size_t m, std::size_t band_limit);

struct Chi2Config {
  std::optional<std::size_t> explicit_m;
  double c3 = 1.0;
  double r = 0.25;
  double alpha = 0.05;
  double x_alpha = 0.0;

  static Chi2Config with_rule(double c3, double r, double alpha);
  static Chi2Config with_cells(std::size_t m, double alpha);
  // m_n = explicit m or round(c3 n^{2-4r}); checked against 2 <= m <= n^2 / log n.
  std::size_t cells(std::size_t n) const;
};

void validate_cells(std::size_t m, std::size_t n);

// (T - m + 1) / sqrt(2m)
double chi2_standardize(double statistic, std::size_t m) noexcept;
double chi2_predicted_beta(double population, std::size_t m, double x_alpha);
TestReport chi2_decide_predict(std::span<const double> points, const SignalSpec* alternative,
                               const Chi2Config& config, std::size_t n);
TestReport chi2_decide_population(double population, std::size_t m, const Chi2Config& config, std::size_t n);

}  // namespace uniconsist
