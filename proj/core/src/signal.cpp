#include "uniconsist/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "uniconsist/error.hpp"

namespace uniconsist {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

// Angular speed of the basis: pi for CosinePi/SinePi, 2 pi for TrigFull.
double omega(BasisKind basis) noexcept { return basis == BasisKind::TrigFull ? 2.0 * kPi : kPi; }

struct ValueAndIntegral {
  double value = 0.0;
  double integral = 0.0;
};

// Sums f(x) and its antiderivative over the support. Dense supports walk the
// frequencies with a complex rotation instead of calling sin/cos per term.
ValueAndIntegral sum_series(const SignalSpec& s, double x) noexcept {
  ValueAndIntegral out;
  const auto support = s.support();
  if (support.empty()) return out;
  const BasisKind basis = s.basis();
  const auto coeffs = s.coeffs();
  const double w = omega(basis);
  const std::size_t max_freq = frequency_of(basis, support.back());

  auto accumulate = [&](std::size_t coord, double c, double sn, double j) {
    const double a = coeffs[coord];
    switch (basis) {
      case BasisKind::CosinePi:
        out.value += a * kSqrt2 * c;
        out.integral += a * kSqrt2 * sn / (kPi * j);
        break;
      case BasisKind::SinePi:
        out.value += a * kSqrt2 * sn;
        out.integral += a * kSqrt2 * (1.0 - c) / (kPi * j);
        break;
      case BasisKind::TrigFull:
        if (coord % 2 == 0) {
          out.value += a * kSqrt2 * c;
          out.integral += a * kSqrt2 * sn / (2.0 * kPi * j);
        } else {
          out.value += a * kSqrt2 * sn;
          out.integral += a * kSqrt2 * (1.0 - c) / (2.0 * kPi * j);
        }
        break;
    }
  };

  if (support.size() >= 32 && max_freq <= 4 * support.size()) {
    const std::complex<double> step{std::cos(w * x), std::sin(w * x)};
    std::complex<double> z = step;
    std::size_t freq = 1;
    for (std::size_t coord : support) {
      const std::size_t j = frequency_of(basis, coord);
      while (freq < j) {
        z *= step;
        ++freq;
      }
      accumulate(coord, z.real(), z.imag(), static_cast<double>(j));
    }
    return out;
  }
  for (std::size_t coord : support) {
    const std::size_t j = frequency_of(basis, coord);
    const double arg = w * static_cast<double>(j) * x;
    accumulate(coord, std::cos(arg), std::sin(arg), static_cast<double>(j));
  }
  return out;
}

}  // namespace

std::string_view to_string(BasisKind basis) noexcept {
  switch (basis) {
    case BasisKind::CosinePi: return "CosinePi";
    case BasisKind::TrigFull: return "TrigFull";
    case BasisKind::SinePi: return "SinePi";
  }
  return "CosinePi";
}

BasisKind basis_from_string(std::string_view name) {
  if (name == "CosinePi") return BasisKind::CosinePi;
  if (name == "TrigFull") return BasisKind::TrigFull;
  if (name == "SinePi") return BasisKind::SinePi;
  throw PreconditionError("unknown basis '" + std::string(name) + "' (expected CosinePi, TrigFull or SinePi)");
}

std::size_t coords_per_frequency(BasisKind basis) noexcept { return basis == BasisKind::TrigFull ? 2 : 1; }

std::size_t frequency_of(BasisKind basis, std::size_t coord) noexcept {
  return basis == BasisKind::TrigFull ? coord / 2 + 1 : coord + 1;
}

double basis_value(BasisKind basis, std::size_t coord, double t) noexcept {
  const double j = static_cast<double>(frequency_of(basis, coord));
  const double arg = omega(basis) * j * t;
  switch (basis) {
    case BasisKind::CosinePi: return kSqrt2 * std::cos(arg);
    case BasisKind::SinePi: return kSqrt2 * std::sin(arg);
    case BasisKind::TrigFull: return kSqrt2 * (coord % 2 == 0 ? std::cos(arg) : std::sin(arg));
  }
  return 0.0;
}

double basis_antiderivative(BasisKind basis, std::size_t coord, double x) noexcept {
  const double j = static_cast<double>(frequency_of(basis, coord));
  const double w = omega(basis) * j;
  const double arg = w * x;
  switch (basis) {
    case BasisKind::CosinePi: return kSqrt2 * std::sin(arg) / w;
    case BasisKind::SinePi: return kSqrt2 * (1.0 - std::cos(arg)) / w;
    case BasisKind::TrigFull:
      return coord % 2 == 0 ? kSqrt2 * std::sin(arg) / w : kSqrt2 * (1.0 - std::cos(arg)) / w;
  }
  return 0.0;
}

SignalSpec::SignalSpec(BasisKind basis, std::vector<double> coeffs) : basis_(basis), coeffs_(std::move(coeffs)) {
  if (basis_ == BasisKind::TrigFull && coeffs_.size() % 2 != 0)
    throw PreconditionError("TrigFull coefficients come in (a_j, b_j) pairs; got an odd count");
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw PreconditionError("signal coefficients must be finite");
  rebuild_support();
}

SignalSpec SignalSpec::zero(BasisKind basis, std::size_t frequencies) {
  return SignalSpec(basis, std::vector<double>(frequencies * coords_per_frequency(basis), 0.0));
}

SignalSpec SignalSpec::spike(BasisKind basis, std::size_t coord, double value) {
  std::size_t len = coord + 1;
  if (basis == BasisKind::TrigFull && len % 2 != 0) ++len;
  std::vector<double> c(len, 0.0);
  c[coord] = value;
  return SignalSpec(basis, std::move(c));
}

void SignalSpec::rebuild_support() {
  support_.clear();
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0.0) support_.push_back(i);
}

std::size_t SignalSpec::frequencies() const noexcept { return coeffs_.size() / coords_per_frequency(basis_); }

double SignalSpec::norm_sq() const noexcept {
  double s = 0.0;
  for (std::size_t i : support_) s += coeffs_[i] * coeffs_[i];
  return s;
}

double SignalSpec::frequency_mass(std::size_t j) const noexcept {
  if (j == 0) return 0.0;
  const std::size_t k = coords_per_frequency(basis_);
  double s = 0.0;
  for (std::size_t c = (j - 1) * k; c < j * k && c < coeffs_.size(); ++c) s += coeffs_[c] * coeffs_[c];
  return s;
}

std::vector<double> SignalSpec::frequency_masses() const {
  std::vector<double> m(frequencies(), 0.0);
  for (std::size_t i : support_) m[frequency_of(basis_, i) - 1] += coeffs_[i] * coeffs_[i];
  return m;
}

SignalSpec SignalSpec::scaled(double factor) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= factor;
  return SignalSpec(basis_, std::move(c));
}

SignalSpec SignalSpec::resized(std::size_t frequencies) const {
  std::vector<double> c = coeffs_;
  c.resize(frequencies * coords_per_frequency(basis_), 0.0);
  return SignalSpec(basis_, std::move(c));
}

double SignalSpec::mass_beyond(std::size_t frequencies) const noexcept {
  const std::size_t cut = frequencies * coords_per_frequency(basis_);
  double s = 0.0;
  for (std::size_t i : support_)
    if (i >= cut) s += coeffs_[i] * coeffs_[i];
  return s;
}

SignalSpec operator+(const SignalSpec& a, const SignalSpec& b) {
  if (a.basis_ != b.basis_) throw PreconditionError("cannot add signals on different bases");
  std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return SignalSpec(a.basis_, std::move(c));
}

double evaluate(const SignalSpec& signal, double t) {
  if (!(t > 0.0 && t < 1.0)) {
    std::ostringstream os;
    os << "evaluate: t = " << t << " is outside (0,1)";
    throw DomainError(os.str());
  }
  return evaluate_closed(signal, t);
}

double evaluate_closed(const SignalSpec& signal, double t) noexcept { return sum_series(signal, t).value; }

double antiderivative(const SignalSpec& signal, double x) noexcept { return sum_series(signal, x).integral; }

std::complex<double>& ComplexCoeffs::at(long j) {
  const long J = static_cast<long>(J_);
  if (j < -J || j > J) throw PreconditionError("complex coefficient index out of range");
  return c_[static_cast<std::size_t>(j + J)];
}

double ComplexCoeffs::norm_sq() const noexcept {
  double s = 0.0;
  for (const auto& z : c_) s += std::norm(z);
  return s;
}

ComplexCoeffs to_complex(const SignalSpec& signal) {
  if (signal.basis() != BasisKind::TrigFull) throw PreconditionError("to_complex requires a TrigFull signal");
  const std::size_t J = signal.frequencies();
  ComplexCoeffs c(J);
  for (std::size_t j = 1; j <= J; ++j) {
    const double a = signal.coeff(2 * (j - 1));
    const double b = signal.coeff(2 * (j - 1) + 1);
    const std::complex<double> z{a / kSqrt2, -b / kSqrt2};
    c.at(static_cast<long>(j)) = z;
    c.at(-static_cast<long>(j)) = std::conj(z);
  }
  return c;
}

SignalSpec from_complex(const ComplexCoeffs& c, double tolerance) {
  const std::size_t J = c.J();
  if (std::abs(c[0]) > tolerance) throw PreconditionError("from_complex: c_0 must vanish (mean-zero signal)");
  std::vector<double> coeffs(2 * J, 0.0);
  for (std::size_t j = 1; j <= J; ++j) {
    const long lj = static_cast<long>(j);
    if (std::abs(c[lj] - std::conj(c[-lj])) > tolerance)
      throw PreconditionError("from_complex: coefficients are not Hermitian at j = " + std::to_string(j));
    coeffs[2 * (j - 1)] = kSqrt2 * c[lj].real();
    coeffs[2 * (j - 1) + 1] = -kSqrt2 * c[lj].imag();
  }
  return SignalSpec(BasisKind::TrigFull, std::move(coeffs));
}

NoiseModel NoiseModel::make(double sigma, std::size_t n) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw PreconditionError("noise: sigma must be positive");
  if (n == 0) throw PreconditionError("noise: n must be a positive integer");
  return NoiseModel{sigma, n};
}

double NoiseModel::coordinate_sd() const noexcept { return sigma / std::sqrt(static_cast<double>(n)); }

std::vector<double> sample_sequence_model(const SignalSpec& signal, const NoiseModel& noise, RngStream& rng,
                                          std::size_t coords) {
  NoiseModel::make(noise.sigma, noise.n);
  if (coords == 0) coords = signal.coords();
  if (coords == 0) throw PreconditionError("sample_sequence_model: J must be at least 1");
  const double sd = noise.coordinate_sd();
  std::vector<double> y(coords);
  for (std::size_t i = 0; i < coords; ++i) y[i] = signal.coeff(i) + sd * rng.normal();
  return y;
}

NonnegativityReport check_nonnegative(const SignalSpec& signal, std::size_t grid) {
  NonnegativityReport rep;
  if (signal.is_zero()) {
    rep.certified_by_bound = true;
    return rep;
  }
  double abs_sum = 0.0;
  for (std::size_t i : signal.support()) abs_sum += std::abs(signal.coeffs()[i]);
  abs_sum *= kSqrt2;
  if (abs_sum < 1.0) {
    rep.certified_by_bound = true;
    rep.min_value = 1.0 - abs_sum;
    return rep;
  }

  const std::size_t max_freq = frequency_of(signal.basis(), signal.support().back());
  const std::size_t per_unit = signal.basis() == BasisKind::TrigFull ? 2 : 1;
  std::size_t g = std::max<std::size_t>(grid, 16 * max_freq * per_unit + 1);
  g = std::min<std::size_t>(g, std::size_t{1} << 22);
  rep.grid_points = g;

  std::vector<double> v(g);
  const double step = 1.0 / static_cast<double>(g - 1);
  for (std::size_t i = 0; i < g; ++i) v[i] = 1.0 + evaluate_closed(signal, static_cast<double>(i) * step);

  constexpr std::size_t kMaxListed = 32;
  auto record = [&](double t, double value) {
    if (value < rep.min_value) {
      rep.min_value = value;
      rep.argmin = t;
    }
    if (value < 0.0) {
      rep.ok = false;
      ++rep.violation_count;
      if (rep.violations.size() < kMaxListed) rep.violations.push_back(t);
    }
  };
  for (std::size_t i = 0; i < g; ++i) record(static_cast<double>(i) * step, v[i]);

  // Polish the deepest grid minima with golden-section search.
  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < g; ++i) {
    const bool left = i == 0 || v[i] <= v[i - 1];
    const bool right = i + 1 == g || v[i] <= v[i + 1];
    if (left && right && v[i] >= 0.0) minima.push_back(i);
  }
  constexpr std::size_t kPolish = 64;
  if (minima.size() > kPolish) {
    std::partial_sort(minima.begin(), minima.begin() + kPolish, minima.end(),
                      [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    minima.resize(kPolish);
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t i : minima) {
    double lo = i == 0 ? 0.0 : static_cast<double>(i - 1) * step;
    double hi = i + 1 == g ? 1.0 : static_cast<double>(i + 1) * step;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = evaluate_closed(signal, x1), f2 = evaluate_closed(signal, x2);
    for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = evaluate_closed(signal, x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = evaluate_closed(signal, x2);
      }
    }
    const double t = 0.5 * (lo + hi);
    record(t, 1.0 + evaluate_closed(signal, t));
  }
  return rep;
}

DensitySpec::DensitySpec(SignalSpec signal, std::size_t check_grid) : signal_(std::move(signal)) {
  if (signal_.basis() == BasisKind::SinePi && !signal_.is_zero())
    throw PreconditionError("SinePi elements do not integrate to zero; 1 + f would not be a density");
  report_ = check_nonnegative(signal_, check_grid);
  if (!report_.ok) {
    std::ostringstream os;
    os << "1 + f is negative at " << report_.violation_count << " checked points (min " << report_.min_value
       << " at t = " << report_.argmin << "); violating t:";
    for (double t : report_.violations) os << ' ' << t;
    throw PreconditionError(os.str());
  }
}

double DensitySpec::density(double x) const noexcept { return 1.0 + evaluate_closed(signal_, x); }

double DensitySpec::cdf(double x) const noexcept { return x + antiderivative(signal_, x); }

double inverse_cdf(const DensitySpec& density, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("inverse_cdf: u must lie in [0,1]");
  const SignalSpec& s = density.signal();
  if (s.is_zero()) return u;
  double lo = 0.0, hi = 1.0, x = u;
  for (int it = 0; it < 200; ++it) {
    const ValueAndIntegral vi = sum_series(s, x);
    const double r = x + vi.integral - u;
    if (std::abs(r) <= 1e-12) return x;
    if (r > 0.0)
      hi = x;
    else
      lo = x;
    if (hi - lo <= 4e-16) return x;
    const double d = 1.0 + vi.value;
    double next = d > 0.0 ? x - r / d : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

std::vector<double> sample_iid(const DensitySpec& density, std::size_t n, RngStream& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = inverse_cdf(density, rng.uniform());
  return x;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> points) : sorted_(std::move(points)) {
  if (sorted_.empty()) throw PreconditionError("empirical_cdf: empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const noexcept {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EmpiricalCdf empirical_cdf(std::vector<double> points) { return EmpiricalCdf(std::move(points)); }

}  // namespace uniconsist
