#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "uniconsist/signal.hpp"

namespace uniconsist {

// BarB uses the one-sided index. FullB/TildeB use the two-sided exponential
// index; for mean-zero signals (no theta_0) all three reduce to the same
// functional of the frequency masses.
enum class BesovVariant { BarB, FullB, TildeB };

// max over integers m >= 1 of m^{2s} sum_{j >= m} theta_j^2. TrigFull signals
// use the pair mass a_j^2 + b_j^2 per frequency.
double besov_seminorm(const SignalSpec& signal, double s);

struct BesovBody {
  double s = 0.5;
  double P0 = 1.0;
  BesovVariant variant = BesovVariant::BarB;

  bool contains(const SignalSpec& signal) const;
};

struct TailBoundReport {
  std::size_t l_n = 0;
  double tail_sum = 0.0;
  double bound = 0.0;
  bool ok = false;
  double seminorm = 0.0;
  double C1 = 0.0;
  // Populated when a lower bound ||f||^2 >= c n^{-2r} is supplied.
  std::optional<double> head_sum;
  std::optional<double> head_lower_bound;
  std::optional<bool> head_ok;
};

// l_n = ceil(C1 n^{r/s}); checks sum_{j >= l_n} theta_j^2 <= P0 C1^{-2s} n^{-2r}.
// With `norm_sq_lower_c` = c the head below l_n must also carry at least
// (c - P0 C1^{-2s}) n^{-2r} >= (c/2) n^{-2r}; C1^{2s} > 2 P0 / c is enforced.
TailBoundReport tail_bound_check(const SignalSpec& signal, double s, double P0, double r, double n, double C1,
                                 std::optional<double> norm_sq_lower_c = std::nullopt);

// Radius of the Besov body that contains the head of f below `cutoff`:
// cutoff^{2s} ||f||^2.
double head_besov_radius(double s, std::size_t cutoff, double norm_sq);

struct FiniteBand {
  std::size_t l = 1;
  double P0 = 1.0;
};

bool finite_band_membership(const SignalSpec& signal, const FiniteBand& band);

struct EllipsoidSet {
  std::vector<double> axes;
};
struct PointSet {
  std::vector<std::vector<double>> points;
};
using SetDescriptor = std::variant<EllipsoidSet, PointSet>;

struct WidthSequence {
  std::vector<double> d;
  std::vector<std::vector<double>> basis_vectors;
};

std::size_t descriptor_dimension(const SetDescriptor& set);
WidthSequence greedy_widths(const SetDescriptor& set, std::size_t i_max);

struct CompactnessVerdict {
  // First 1-based index with d_i < epsilon; empty means no decay through i_max.
  std::optional<std::size_t> first_index;
  std::size_t i_max = 0;
  double epsilon = 0.0;
  WidthSequence widths;

  std::string describe() const;
};

// i_max = 0 uses the descriptor dimension.
CompactnessVerdict compactness_diagnostic(const SetDescriptor& set, double epsilon, std::size_t i_max = 0);

}  // namespace uniconsist
