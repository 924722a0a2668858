#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uniconsist/rng.hpp"

namespace uniconsist {

// CosinePi: sqrt2 cos(pi j t). TrigFull: interleaved pairs sqrt2 cos(2 pi j t),
// sqrt2 sin(2 pi j t). SinePi: sqrt2 sin(pi j t). All indexed from j = 1.
enum class BasisKind { CosinePi, TrigFull, SinePi };

std::string_view to_string(BasisKind basis) noexcept;
BasisKind basis_from_string(std::string_view name);

std::size_t coords_per_frequency(BasisKind basis) noexcept;
// Frequency j >= 1 of a storage coordinate.
std::size_t frequency_of(BasisKind basis, std::size_t coord) noexcept;
double basis_value(BasisKind basis, std::size_t coord, double t) noexcept;
// Integral of the basis element over (0, x).
double basis_antiderivative(BasisKind basis, std::size_t coord, double x) noexcept;

class SignalSpec {
 public:
  SignalSpec() = default;
  SignalSpec(BasisKind basis, std::vector<double> coeffs);

  static SignalSpec zero(BasisKind basis, std::size_t frequencies);
  // Single coefficient at storage coordinate `coord`.
  static SignalSpec spike(BasisKind basis, std::size_t coord, double value);

  BasisKind basis() const noexcept { return basis_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double coeff(std::size_t coord) const noexcept { return coord < coeffs_.size() ? coeffs_[coord] : 0.0; }
  std::size_t coords() const noexcept { return coeffs_.size(); }
  std::size_t frequencies() const noexcept;
  // Nonzero storage coordinates in increasing order.
  std::span<const std::size_t> support() const noexcept { return support_; }
  bool is_zero() const noexcept { return support_.empty(); }

  double norm_sq() const noexcept;
  // theta_j^2, or a_j^2 + b_j^2 for TrigFull; j is 1-based.
  double frequency_mass(std::size_t j) const noexcept;
  std::vector<double> frequency_masses() const;

  SignalSpec scaled(double factor) const;
  // Pads with zeros or truncates to the given number of frequencies.
  SignalSpec resized(std::size_t frequencies) const;
  // Mass that `resized(frequencies)` would drop.
  double mass_beyond(std::size_t frequencies) const noexcept;

  friend SignalSpec operator+(const SignalSpec& a, const SignalSpec& b);
  friend bool operator==(const SignalSpec& a, const SignalSpec& b) = default;

 private:
  void rebuild_support();

  BasisKind basis_ = BasisKind::CosinePi;
  std::vector<double> coeffs_;
  std::vector<std::size_t> support_;
};

// f(t) for t in (0,1).
double evaluate(const SignalSpec& signal, double t);
// Same sum without the domain check; valid on the closed interval.
double evaluate_closed(const SignalSpec& signal, double t) noexcept;
// Integral of f over (0, x).
double antiderivative(const SignalSpec& signal, double x) noexcept;

// Complex exponential coefficients c_j, j = -J..J, of a TrigFull signal:
// c_j = (a_j - i b_j)/sqrt2, c_{-j} = conj(c_j), c_0 = 0.
class ComplexCoeffs {
 public:
  ComplexCoeffs() = default;
  explicit ComplexCoeffs(std::size_t J) : J_(J), c_(2 * J + 1) {}

  std::size_t J() const noexcept { return J_; }
  std::complex<double> operator[](long j) const noexcept {
    const long J = static_cast<long>(J_);
    return (j < -J || j > J) ? std::complex<double>{} : c_[static_cast<std::size_t>(j + J)];
  }
  std::complex<double>& at(long j);
  double norm_sq() const noexcept;

 private:
  std::size_t J_ = 0;
  std::vector<std::complex<double>> c_;
};

ComplexCoeffs to_complex(const SignalSpec& signal);
// Requires c_{-j} = conj(c_j) and c_0 = 0 within `tolerance`.
SignalSpec from_complex(const ComplexCoeffs& c, double tolerance = 1e-14);

struct NoiseModel {
  double sigma = 1.0;
  std::size_t n = 1;

  static NoiseModel make(double sigma, std::size_t n);
  double coordinate_sd() const noexcept;
};

// y_j = theta_j + (sigma/sqrt n) xi_j for the first `coords` storage coordinates
// (defaults to the signal length).
std::vector<double> sample_sequence_model(const SignalSpec& signal, const NoiseModel& noise,
                                          RngStream& rng, std::size_t coords = 0);

struct NonnegativityReport {
  bool ok = true;
  // Certified by sum |theta| sqrt2 < 1 without a grid.
  bool certified_by_bound = false;
  double min_value = 1.0;
  double argmin = 0.0;
  std::size_t grid_points = 0;
  std::size_t violation_count = 0;
  // First violating abscissae (capped).
  std::vector<double> violations;
};

// Checks 1 + f >= 0 on [0,1]. The grid is refined to at least 16 points per
// period of the highest frequency, and the deepest local minima are polished.
NonnegativityReport check_nonnegative(const SignalSpec& signal, std::size_t grid = 4096);

class DensitySpec {
 public:
  // Throws PreconditionError naming violating abscissae when 1 + f < 0.
  explicit DensitySpec(SignalSpec signal, std::size_t check_grid = 4096);

  const SignalSpec& signal() const noexcept { return signal_; }
  const NonnegativityReport& report() const noexcept { return report_; }
  double density(double x) const noexcept;
  double cdf(double x) const noexcept;

 private:
  SignalSpec signal_;
  NonnegativityReport report_;
};

// Solves F(x) = u with |F(x) - u| <= 1e-12 (safeguarded Newton on a bisection bracket).
double inverse_cdf(const DensitySpec& density, double u);
std::vector<double> sample_iid(const DensitySpec& density, std::size_t n, RngStream& rng);

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> points);

  double operator()(double x) const noexcept;
  std::size_t size() const noexcept { return sorted_.size(); }
  std::span<const double> sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf empirical_cdf(std::vector<double> points);

}  // namespace uniconsist
