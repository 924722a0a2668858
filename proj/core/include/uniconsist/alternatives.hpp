#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uniconsist/signal.hpp"

namespace uniconsist {

struct KappaProfile;

enum class Family { Quad, Kernel, Chi2, Cvm, Fixed };

std::string_view to_string(Family family) noexcept;
Family family_from_string(std::string_view name);
BasisKind family_basis(Family family) noexcept;

// Effective band k_n. Quad reads the exact cumulative definition from the
// profile; kernel and chi2 use floor(n^{2-4r}); cvm uses floor(n^{(1-2r)/2});
// r = 1/2 gives 1 for every family.
std::size_t band_index(Family family, double r, std::size_t n, const KappaProfile* profile = nullptr);

struct SequenceEntry {
  std::size_t n = 0;
  std::size_t k_n = 0;
  SignalSpec signal;
};

struct AlternativeSequence {
  Family family = Family::Quad;
  double r = 0.25;
  std::string kind;  // consistent, inconsistent, sum, custom
  // Certified envelope c n^{-r} <= ||f_n|| <= C n^{-r}.
  double c_env = 0.0;
  double C_env = 0.0;
  std::vector<SequenceEntry> entries;

  const SequenceEntry& at(std::size_t n) const;
  std::vector<std::size_t> n_list() const;
  // Recomputes (c_env, C_env) from the stored norms.
  void refresh_envelope();
};

enum class MassProfile { Lowest, Spread, Random };

MassProfile mass_profile_from_string(std::string_view name);
std::string_view to_string(MassProfile profile) noexcept;

struct ConsistentRecipe {
  double amplitude = 1.0;  // ||f_n|| = amplitude n^{-r}
  double c1 = 0.5;         // declared head-mass constant
  double c2 = 1.0;         // band |j| < c2 k_n
  MassProfile profile = MassProfile::Lowest;
  std::uint64_t seed = 1;
  // Cap on the number of frequencies carrying mass (Spread/Random); 0 = whole band.
  std::size_t max_terms = 0;
};

AlternativeSequence make_consistent(Family family, double r, const ConsistentRecipe& recipe,
                                    std::span<const std::size_t> n_list, const KappaProfile* profile = nullptr);

struct InconsistentRecipe {
  double amplitude = 1.0;
  // m_n / k_n per n; must be strictly increasing.
  std::vector<double> separation;
  // Consecutive frequencies sharing the mass, starting at m_n.
  std::size_t width = 1;
};

AlternativeSequence make_inconsistent(Family family, double r, const InconsistentRecipe& recipe,
                                      std::span<const std::size_t> n_list, const KappaProfile* profile = nullptr);

// Head keeps frequencies j < cutoff; tail keeps the rest.
std::pair<SignalSpec, SignalSpec> decompose(const SignalSpec& signal, std::size_t cutoff);
// Frequency mass strictly below `limit` (a real threshold, e.g. c2 k_n).
double head_mass(const SignalSpec& signal, double limit);
// Frequency mass strictly above `limit`.
double far_tail_mass(const SignalSpec& signal, double limit);

AlternativeSequence add_sequences(const AlternativeSequence& a, const AlternativeSequence& b);

struct ClassifyThresholds {
  double c1 = 0.1;
  double c2 = 1.0;
  double eps = 0.05;
  double C1 = 4.0;
};

enum class Verdict { ConsistentWitness, InconsistentWitness, PurelyConsistentWitness, Indeterminate };
std::string_view to_string(Verdict v) noexcept;

struct ClassificationRow {
  std::size_t n = 0;
  std::size_t k_n = 0;
  double norm_sq_scaled = 0.0;   // ||f||^2 n^{2r}
  double head_scaled = 0.0;      // sum_{j < c2 k_n} / n^{-2r}
  double far_tail_scaled = 0.0;  // sum_{j > C1 k_n} / n^{-2r}
};

struct Classification {
  Verdict verdict = Verdict::Indeterminate;
  // PurelyConsistentWitness when the consistent surrogate and the far-tail
  // surrogate both hold; Indeterminate otherwise.
  Verdict purity = Verdict::Indeterminate;
  bool con2 = false;
  bool con3 = false;
  bool con19 = false;
  ClassifyThresholds thresholds;
  std::vector<ClassificationRow> evidence;
};

Classification classify(const AlternativeSequence& seq, const ClassifyThresholds& thresholds);

struct DensityCheckRow {
  std::size_t n = 0;
  std::size_t cutoff = 0;
  bool sufficient_bound = false;  // sum |theta| sqrt2 < 1
  bool signal_ok = false, head_ok = false, tail_ok = false;
  double signal_min = 0.0, head_min = 0.0, tail_min = 0.0;
  std::vector<double> violations;
};

// Grid checks of 1 + f_n and of 1 + head / 1 + tail at cutoff ceil(cutoff_factor k_n).
std::vector<DensityCheckRow> densitize(const AlternativeSequence& seq, double cutoff_factor = 1.0);

}  // namespace uniconsist
