#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uniconsist/alternatives.hpp"
#include "uniconsist/chi2_test.hpp"
#include "uniconsist/cvm_test.hpp"
#include "uniconsist/kernel_test.hpp"
#include "uniconsist/quad_test.hpp"
#include "uniconsist/signal.hpp"

namespace uniconsist {

struct MCConfig {
  std::size_t replicates = 10000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  void validate() const;
};

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval for k successes out of n.
Interval wilson_interval(double successes, double trials, double z = 1.959963984540054);

struct MCEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t replicates = 0;
  std::size_t rejections = 0;
  Interval ci95;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

MCEstimate make_estimate(std::size_t rejections, std::size_t replicates);

// One alternative prepared for repeated sampling. `coords` is the dense
// coefficient vector seen by sequence-model families; `density` is set for
// i.i.d. families.
struct Scenario {
  std::string label;
  std::optional<SignalSpec> signal;
  std::optional<DensitySpec> density;
  std::vector<double> coords;
  std::vector<std::size_t> support;
  // Coefficient mass the family cannot observe (beyond its truncation).
  double unobserved_mass = 0.0;
};

struct Workspace {
  std::vector<double> a, b;
  std::vector<std::size_t> counts;
};

class FamilyTest {
 public:
  virtual ~FamilyTest() = default;

  virtual Family family() const noexcept = 0;
  virtual std::size_t n() const noexcept = 0;
  virtual double alpha() const noexcept = 0;
  // Number of observed storage coordinates for sequence-model families, 0 otherwise.
  virtual std::size_t coords() const noexcept { return 0; }
  // Draws one replicate's noise from `rng` and decides every scenario on it,
  // so all scenarios of a replicate share their random numbers.
  virtual void decide(std::span<const Scenario> scenarios, RngStream& rng, Workspace& ws,
                      std::span<std::uint8_t> reject) const = 0;
  // Drift d with predicted beta = Phi(x_alpha - d); empty when the family has no formula.
  virtual std::optional<double> drift(const SignalSpec& alternative) const { (void)alternative; return std::nullopt; }
  std::optional<double> predicted_beta(const SignalSpec& alternative) const;
  // Family-specific noncentrality or consistency index.
  virtual double index(const SignalSpec& alternative) const = 0;

  Scenario prepare(const SignalSpec* alternative, std::string label = {}) const;
};

class QuadFamilyTest final : public FamilyTest {
 public:
  explicit QuadFamilyTest(QuadTestConfig config) : cfg_(std::move(config)) {}
  Family family() const noexcept override { return Family::Quad; }
  std::size_t n() const noexcept override { return cfg_.level.n; }
  double alpha() const noexcept override { return cfg_.alpha; }
  std::size_t coords() const noexcept override { return cfg_.level.J(); }
  void decide(std::span<const Scenario> scenarios, RngStream& rng, Workspace& ws,
              std::span<std::uint8_t> reject) const override;
  std::optional<double> drift(const SignalSpec& alternative) const override;
  double index(const SignalSpec& alternative) const override;
  const QuadTestConfig& config() const noexcept { return cfg_; }

 private:
  QuadTestConfig cfg_;
};

class KernelFamilyTest final : public FamilyTest {
 public:
  explicit KernelFamilyTest(KernelTestConfig config) : cfg_(std::move(config)) {}
  Family family() const noexcept override { return Family::Kernel; }
  std::size_t n() const noexcept override { return cfg_.noise.n; }
  double alpha() const noexcept override { return cfg_.alpha; }
  std::size_t coords() const noexcept override { return 2 * cfg_.J; }
  void decide(std::span<const Scenario> scenarios, RngStream& rng, Workspace& ws,
              std::span<std::uint8_t> reject) const override;
  std::optional<double> drift(const SignalSpec& alternative) const override;
  double index(const SignalSpec& alternative) const override;
  const KernelTestConfig& config() const noexcept { return cfg_; }

 private:
  KernelTestConfig cfg_;
};

class Chi2FamilyTest final : public FamilyTest {
 public:
  Chi2FamilyTest(std::size_t n, std::size_t m, double alpha);
  Family family() const noexcept override { return Family::Chi2; }
  std::size_t n() const noexcept override { return n_; }
  double alpha() const noexcept override { return alpha_; }
  std::size_t cells() const noexcept { return m_; }
  void decide(std::span<const Scenario> scenarios, RngStream& rng, Workspace& ws,
              std::span<std::uint8_t> reject) const override;
  std::optional<double> drift(const SignalSpec& alternative) const override;
  double index(const SignalSpec& alternative) const override;

 private:
  std::size_t n_, m_;
  double alpha_, x_alpha_;
};

class CvmFamilyTest final : public FamilyTest {
 public:
  CvmFamilyTest(std::size_t n, double critical, double alpha);
  Family family() const noexcept override { return Family::Cvm; }
  std::size_t n() const noexcept override { return n_; }
  double alpha() const noexcept override { return alpha_; }
  double critical() const noexcept { return critical_; }
  void decide(std::span<const Scenario> scenarios, RngStream& rng, Workspace& ws,
              std::span<std::uint8_t> reject) const override;
  // n T^2(F - F0)
  double index(const SignalSpec& alternative) const override;

 private:
  std::size_t n_;
  double critical_, alpha_;
};

// Observations z_j = sqrt(n) theta_j + sigma_j xi_j tested with sum kappa_j^2 z_j^2.
class FixedKappaFamilyTest final : public FamilyTest {
 public:
  FixedKappaFamilyTest(FixedKappa kappa, std::size_t n, double critical, double alpha);
  Family family() const noexcept override { return Family::Fixed; }
  std::size_t n() const noexcept override { return n_; }
  double alpha() const noexcept override { return alpha_; }
  std::size_t coords() const noexcept override { return kappa_.J(); }
  double critical() const noexcept { return critical_; }
  void decide(std::span<const Scenario> scenarios, RngStream& rng, Workspace& ws,
              std::span<std::uint8_t> reject) const override;
  // T(sqrt(n) theta)
  double index(const SignalSpec& alternative) const override;

 private:
  FixedKappa kappa_;
  std::size_t n_;
  double critical_, alpha_;
};

// Upper alpha quantile of sum kappa_j^2 sigma_j^2 xi_j^2 by simulation.
double fixed_kappa_critical(const FixedKappa& kappa, double alpha, std::size_t replicates, std::uint64_t seed,
                            std::size_t threads = 1);

// Rejection counts of several scenarios on common random numbers.
struct PairedCounts {
  std::size_t replicates = 0;
  std::size_t scenarios = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<std::size_t> rejections;
  // discordant[a * S + b]: replicates where a rejects and b does not.
  std::vector<std::size_t> discordant;

  MCEstimate estimate(std::size_t s) const;
  // Standard error of rate(a) - rate(b) under pairing.
  double joint_se(std::size_t a, std::size_t b) const;
};

PairedCounts run_paired(const FamilyTest& test, std::span<const Scenario> scenarios, const MCConfig& mc,
                        std::uint64_t stream);
// Default stream for a family at sample size n.
std::uint64_t default_stream(const FamilyTest& test);

MCEstimate estimate_size(const FamilyTest& test, const MCConfig& mc);
MCEstimate estimate_power(const FamilyTest& test, const SignalSpec& alternative, const MCConfig& mc);

}  // namespace uniconsist
