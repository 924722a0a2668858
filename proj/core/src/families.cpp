#include <algorithm>
#include <cmath>
#include <thread>

#include "uniconsist/error.hpp"
#include "uniconsist/mc.hpp"
#include "uniconsist/normal.hpp"

namespace uniconsist {

namespace {

// sum w_i (c_i + e_i)^2 = base + sum over the scenario support of w_i (2 c_i e_i + c_i^2),
// where base = sum w_i e_i^2; `weight(i)` maps a storage coordinate to its weight.
template <class Weight>
double shifted_quadratic(double base, const Scenario& sc, std::span<const double> noise, Weight weight) {
  double s = base;
  for (std::size_t i : sc.support) {
    const double c = sc.coords[i];
    s += weight(i) * c * (2.0 * noise[i] + c);
  }
  return s;
}

}  // namespace

void QuadFamilyTest::decide(std::span<const Scenario> scenarios, RngStream& rng, Workspace& ws,
                            std::span<std::uint8_t> reject) const {
  const std::size_t J = cfg_.level.J();
  const double sd = cfg_.sigma / std::sqrt(static_cast<double>(cfg_.level.n));
  const auto& k = cfg_.level.kappa_sq;
  ws.a.resize(J);
  double base = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double e = sd * rng.normal();
    ws.a[j] = e;
    base += k[j] * e * e;
  }
  const double centre = cfg_.sigma * cfg_.sigma * cfg_.level.rho / static_cast<double>(cfg_.level.n);
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const double q = shifted_quadratic(base, scenarios[s], ws.a, [&](std::size_t i) { return k[i]; });
    reject[s] = cfg_.standardize(q - centre) > cfg_.x_alpha;
  }
}

std::optional<double> QuadFamilyTest::drift(const SignalSpec& alternative) const {
  return cfg_.noncentrality(alternative) / std::sqrt(2.0 * cfg_.level.A);
}

double QuadFamilyTest::index(const SignalSpec& alternative) const { return cfg_.noncentrality(alternative); }

void KernelFamilyTest::decide(std::span<const Scenario> scenarios, RngStream& rng, Workspace& ws,
                              std::span<std::uint8_t> reject) const {
  const std::size_t C = 2 * cfg_.J;
  const double sd = cfg_.noise.coordinate_sd();
  const auto& w = cfg_.weights;
  ws.a.resize(C);
  double base = 0.0;
  for (std::size_t i = 0; i < C; ++i) {
    const double e = sd * rng.normal();
    ws.a[i] = e;
    base += w[i / 2] * e * e;
  }
  const double centre = 2.0 * cfg_.noise.sigma * cfg_.noise.sigma * cfg_.weight_sum / static_cast<double>(cfg_.noise.n);
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const double q = shifted_quadratic(base, scenarios[s], ws.a, [&](std::size_t i) { return w[i / 2]; });
    reject[s] = cfg_.scale() * (q - centre) > cfg_.x_alpha;
  }
}

std::optional<double> KernelFamilyTest::drift(const SignalSpec& alternative) const {
  return kernel_drift(alternative, cfg_);
}

double KernelFamilyTest::index(const SignalSpec& alternative) const { return kernel_drift(alternative, cfg_); }

Chi2FamilyTest::Chi2FamilyTest(std::size_t n, std::size_t m, double alpha)
    : n_(n), m_(m), alpha_(alpha), x_alpha_(upper_quantile(alpha)) {
  validate_cells(m, n);
}

void Chi2FamilyTest::decide(std::span<const Scenario> scenarios, RngStream& rng, Workspace& ws,
                            std::span<std::uint8_t> reject) const {
  ws.a.resize(n_);
  for (auto& u : ws.a) u = rng.uniform();
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    ws.counts.assign(m_, 0);
    const auto& sc = scenarios[s];
    if (sc.density) {
      for (double u : ws.a) ++ws.counts[chi2_cell(inverse_cdf(*sc.density, u), m_)];
    } else {
      for (double u : ws.a) ++ws.counts[chi2_cell(u, m_)];
    }
    const double t = chi2_statistic_from_counts(ws.counts, n_);
    reject[s] = chi2_standardize(t, m_) > x_alpha_;
  }
}

std::optional<double> Chi2FamilyTest::drift(const SignalSpec& alternative) const {
  return chi2_population(alternative, m_, n_) / std::sqrt(2.0 * static_cast<double>(m_));
}

double Chi2FamilyTest::index(const SignalSpec& alternative) const { return *drift(alternative); }

CvmFamilyTest::CvmFamilyTest(std::size_t n, double critical, double alpha) : n_(n), critical_(critical), alpha_(alpha) {
  if (n == 0) throw PreconditionError("cvm: n must be positive");
}

void CvmFamilyTest::decide(std::span<const Scenario> scenarios, RngStream& rng, Workspace& ws,
                           std::span<std::uint8_t> reject) const {
  ws.a.resize(n_);
  for (auto& u : ws.a) u = rng.uniform();
  std::sort(ws.a.begin(), ws.a.end());
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto& sc = scenarios[s];
    double t;
    if (sc.density) {
      // The inverse CDF is monotone, so sorted uniforms map to sorted points.
      ws.b.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) ws.b[i] = inverse_cdf(*sc.density, ws.a[i]);
      t = cvm_statistic_sorted(ws.b);
    } else {
      t = cvm_statistic_sorted(ws.a);
    }
    reject[s] = t > critical_;
  }
}

double CvmFamilyTest::index(const SignalSpec& alternative) const {
  return static_cast<double>(n_) * cvm_population(alternative);
}

FixedKappaFamilyTest::FixedKappaFamilyTest(FixedKappa kappa, std::size_t n, double critical, double alpha)
    : kappa_(std::move(kappa)), n_(n), critical_(critical), alpha_(alpha) {
  if (n == 0) throw PreconditionError("fixed-kappa test: n must be positive");
}

void FixedKappaFamilyTest::decide(std::span<const Scenario> scenarios, RngStream& rng, Workspace& ws,
                                  std::span<std::uint8_t> reject) const {
  const auto k = kappa_.kappa_sq();
  const auto sc = kappa_.scales();
  ws.a.resize(k.size());
  double base = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    const double e = sc[j] * rng.normal();
    ws.a[j] = e;
    base += k[j] * e * e;
  }
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const double t = shifted_quadratic(base, scenarios[s], ws.a, [&](std::size_t i) { return k[i]; });
    reject[s] = t > critical_;
  }
}

double FixedKappaFamilyTest::index(const SignalSpec& alternative) const {
  return kappa_.functional(alternative.scaled(std::sqrt(static_cast<double>(n_))));
}

double fixed_kappa_critical(const FixedKappa& kappa, double alpha, std::size_t replicates, std::uint64_t seed,
                            std::size_t threads) {
  if (replicates < 100) throw PreconditionError("fixed-kappa critical value: at least 100 replicates");
  std::vector<double> draws(replicates);
  const auto k = kappa.kappa_sq();
  const auto sc = kappa.scales();
  const std::uint64_t stream = stream_key("fixed-kappa-null", kappa.J());
  auto work = [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      RngStream rng(seed, stream, r);
      double s = 0.0;
      for (std::size_t j = 0; j < k.size(); ++j) {
        const double z = sc[j] * rng.normal();
        s += k[j] * z * z;
      }
      draws[r] = s;
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, replicates));
  const std::size_t chunk = (replicates + threads - 1) / threads;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t b = t * chunk, e = std::min(replicates, b + chunk);
    if (b < e) pool.emplace_back(work, b, e);
  }
  for (auto& th : pool) th.join();
  return empirical_upper_quantile(std::move(draws), alpha);
}

}  // namespace uniconsist
