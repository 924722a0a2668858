#include "uniconsist/mc.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "uniconsist/error.hpp"
#include "uniconsist/normal.hpp"

namespace uniconsist {

void MCConfig::validate() const {
  if (replicates < 100) throw PreconditionError("MC: at least 100 replicates are required");
  if (threads == 0) throw PreconditionError("MC: thread count must be positive");
}

Interval wilson_interval(double k, double n, double z) {
  if (!(n > 0.0)) throw PreconditionError("wilson_interval: no trials");
  const double p = k / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Rounding can push the bounds past p at k = 0 or k = n.
  return {std::clamp(centre - half, 0.0, p), std::clamp(centre + half, p, 1.0)};
}

MCEstimate make_estimate(std::size_t rejections, std::size_t replicates) {
  if (replicates == 0) throw PreconditionError("MC estimate with zero replicates");
  MCEstimate e;
  e.replicates = replicates;
  e.rejections = rejections;
  const double R = static_cast<double>(replicates);
  e.estimate = static_cast<double>(rejections) / R;
  e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / R);
  e.ci95 = wilson_interval(static_cast<double>(rejections), R);
  return e;
}

std::optional<double> FamilyTest::predicted_beta(const SignalSpec& alternative) const {
  const auto d = drift(alternative);
  if (!d) return std::nullopt;
  return normal_cdf(upper_quantile(alpha()) - *d);
}

Scenario FamilyTest::prepare(const SignalSpec* alternative, std::string label) const {
  Scenario sc;
  sc.label = std::move(label);
  const Family fam = family();
  const bool iid = fam == Family::Chi2 || fam == Family::Cvm;
  if (alternative == nullptr || alternative->is_zero()) {
    if (alternative != nullptr) sc.signal = *alternative;
    return sc;
  }
  sc.signal = *alternative;
  if (iid) {
    if (fam == Family::Cvm && alternative->basis() != BasisKind::CosinePi)
      throw PreconditionError("cvm alternatives use the CosinePi basis");
    sc.density.emplace(*alternative);
    return sc;
  }
  const BasisKind want = family_basis(fam);
  if (alternative->basis() != want)
    throw PreconditionError(std::string(to_string(fam)) + " alternatives use the " + std::string(to_string(want)) +
                            " basis");
  const std::size_t J = coords();
  const double factor = fam == Family::Fixed ? std::sqrt(static_cast<double>(n())) : 1.0;
  sc.coords.assign(J, 0.0);
  for (std::size_t i : alternative->support()) {
    const double v = alternative->coeffs()[i] * factor;
    if (i < J) {
      sc.coords[i] = v;
      sc.support.push_back(i);
    } else {
      sc.unobserved_mass += v * v;
    }
  }
  return sc;
}

MCEstimate PairedCounts::estimate(std::size_t s) const {
  MCEstimate e = make_estimate(rejections.at(s), replicates);
  e.seed = seed;
  e.stream = stream;
  return e;
}

double PairedCounts::joint_se(std::size_t a, std::size_t b) const {
  const double R = static_cast<double>(replicates);
  const double n10 = static_cast<double>(discordant.at(a * scenarios + b));
  const double n01 = static_cast<double>(discordant.at(b * scenarios + a));
  const double mean = (n10 - n01) / R;
  const double var = (n10 + n01) / R - mean * mean;
  return std::sqrt(std::max(0.0, var) / R);
}

PairedCounts run_paired(const FamilyTest& test, std::span<const Scenario> scenarios, const MCConfig& mc,
                        std::uint64_t stream) {
  mc.validate();
  if (scenarios.empty()) throw PreconditionError("run_paired: no scenarios");
  const std::size_t S = scenarios.size();
  const std::size_t R = mc.replicates;
  const std::size_t T = std::max<std::size_t>(1, std::min(mc.threads, R));
  std::vector<std::vector<std::size_t>> rej(T, std::vector<std::size_t>(S, 0));
  std::vector<std::vector<std::size_t>> dis(T, std::vector<std::size_t>(S * S, 0));
  auto work = [&](std::size_t t, std::size_t begin, std::size_t end) {
    Workspace ws;
    std::vector<std::uint8_t> flags(S);
    for (std::size_t r = begin; r < end; ++r) {
      RngStream rng(mc.seed, stream, r);
      test.decide(scenarios, rng, ws, flags);
      for (std::size_t a = 0; a < S; ++a) {
        rej[t][a] += flags[a];
        if (!flags[a]) continue;
        for (std::size_t b = 0; b < S; ++b)
          if (!flags[b]) ++dis[t][a * S + b];
      }
    }
  };
  const std::size_t chunk = (R + T - 1) / T;
  if (T == 1) {
    work(0, 0, R);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t b = t * chunk, e = std::min(R, b + chunk);
      if (b < e) pool.emplace_back(work, t, b, e);
    }
    for (auto& th : pool) th.join();
  }
  PairedCounts pc;
  pc.replicates = R;
  pc.scenarios = S;
  pc.seed = mc.seed;
  pc.stream = stream;
  pc.rejections.assign(S, 0);
  pc.discordant.assign(S * S, 0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t a = 0; a < S; ++a) pc.rejections[a] += rej[t][a];
    for (std::size_t k = 0; k < S * S; ++k) pc.discordant[k] += dis[t][k];
  }
  return pc;
}

std::uint64_t default_stream(const FamilyTest& test) {
  return stream_key(std::string(to_string(test.family())).c_str(), test.n());
}

MCEstimate estimate_size(const FamilyTest& test, const MCConfig& mc) {
  const Scenario null = test.prepare(nullptr, "null");
  return run_paired(test, std::span<const Scenario>(&null, 1), mc, default_stream(test)).estimate(0);
}

MCEstimate estimate_power(const FamilyTest& test, const SignalSpec& alternative, const MCConfig& mc) {
  const Scenario alt = test.prepare(&alternative, "alternative");
  return run_paired(test, std::span<const Scenario>(&alt, 1), mc, default_stream(test)).estimate(0);
}

}  // namespace uniconsist
