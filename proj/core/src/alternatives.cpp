#include "uniconsist/alternatives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "uniconsist/error.hpp"
#include "uniconsist/quad_test.hpp"

namespace uniconsist {

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::Quad: return "quad";
    case Family::Kernel: return "kernel";
    case Family::Chi2: return "chi2";
    case Family::Cvm: return "cvm";
    case Family::Fixed: return "fixed";
  }
  return "quad";
}

Family family_from_string(std::string_view name) {
  if (name == "quad") return Family::Quad;
  if (name == "kernel") return Family::Kernel;
  if (name == "chi2") return Family::Chi2;
  if (name == "cvm") return Family::Cvm;
  if (name == "fixed") return Family::Fixed;
  throw PreconditionError("unknown family '" + std::string(name) + "' (expected quad, kernel, chi2, cvm or fixed)");
}

BasisKind family_basis(Family family) noexcept {
  return (family == Family::Kernel || family == Family::Chi2) ? BasisKind::TrigFull : BasisKind::CosinePi;
}

std::size_t band_index(Family family, double r, std::size_t n, const KappaProfile* profile) {
  if (!(r > 0.0 && r <= 0.5)) throw PreconditionError("rate exponent r must lie in (0, 1/2]");
  if (n == 0) throw PreconditionError("n must be positive");
  if (r == 0.5 || family == Family::Fixed) return 1;
  const double nn = static_cast<double>(n);
  // Small offset so exact powers are not lost to rounding in pow.
  auto bracket = [](double v) { return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(v + 1e-9))); };
  switch (family) {
    case Family::Quad:
      if (profile == nullptr) throw PreconditionError("quad family needs a kappa profile to read k_n");
      return profile->level(n).k_n;
    case Family::Kernel:
    case Family::Chi2: return bracket(std::pow(nn, 2.0 - 4.0 * r));
    case Family::Cvm: return bracket(std::pow(nn, (1.0 - 2.0 * r) / 2.0));
    case Family::Fixed: return 1;
  }
  return 1;
}

const SequenceEntry& AlternativeSequence::at(std::size_t n) const {
  for (const auto& e : entries)
    if (e.n == n) return e;
  throw PreconditionError("sequence has no entry for n = " + std::to_string(n));
}

std::vector<std::size_t> AlternativeSequence::n_list() const {
  std::vector<std::size_t> out;
  for (const auto& e : entries) out.push_back(e.n);
  return out;
}

void AlternativeSequence::refresh_envelope() {
  c_env = std::numeric_limits<double>::infinity();
  C_env = 0.0;
  for (const auto& e : entries) {
    const double scaled = std::sqrt(e.signal.norm_sq()) * std::pow(static_cast<double>(e.n), r);
    c_env = std::min(c_env, scaled);
    C_env = std::max(C_env, scaled);
  }
  if (entries.empty()) c_env = 0.0;
}

MassProfile mass_profile_from_string(std::string_view name) {
  if (name == "lowest") return MassProfile::Lowest;
  if (name == "spread") return MassProfile::Spread;
  if (name == "random") return MassProfile::Random;
  throw PreconditionError("unknown mass profile '" + std::string(name) + "' (expected lowest, spread or random)");
}

std::string_view to_string(MassProfile profile) noexcept {
  switch (profile) {
    case MassProfile::Lowest: return "lowest";
    case MassProfile::Spread: return "spread";
    case MassProfile::Random: return "random";
  }
  return "lowest";
}

namespace {

// Frequency masses (index j-1) to coefficients; TrigFull puts each mass on the
// cosine entry unless `angles` supplies a split.
SignalSpec from_masses(BasisKind basis, const std::vector<double>& mass, const std::vector<double>& signs,
                       const std::vector<double>& angles = {}) {
  const std::size_t per = coords_per_frequency(basis);
  std::vector<double> c(mass.size() * per, 0.0);
  for (std::size_t j = 0; j < mass.size(); ++j) {
    if (mass[j] == 0.0) continue;
    const double amp = std::sqrt(mass[j]) * (signs.empty() ? 1.0 : signs[j]);
    if (per == 1) {
      c[j] = amp;
    } else if (angles.empty()) {
      c[2 * j] = amp;
    } else {
      c[2 * j] = amp * std::cos(angles[j]);
      c[2 * j + 1] = amp * std::sin(angles[j]);
    }
  }
  return SignalSpec(basis, std::move(c));
}

void check_rate(double r) {
  if (!(r > 0.0 && r <= 0.5)) throw PreconditionError("rate exponent r must lie in (0, 1/2]");
}

}  // namespace

AlternativeSequence make_consistent(Family family, double r, const ConsistentRecipe& recipe,
                                    std::span<const std::size_t> n_list, const KappaProfile* profile) {
  check_rate(r);
  if (n_list.empty()) throw PreconditionError("make_consistent: empty n_list");
  if (!(recipe.amplitude > 0.0)) throw PreconditionError("make_consistent: amplitude must be positive");
  if (!(recipe.c2 > 0.0)) throw PreconditionError("make_consistent: c2 must be positive");
  if (recipe.c1 > recipe.amplitude * recipe.amplitude) {
    std::ostringstream os;
    os << "make_consistent: infeasible envelope, c1 = " << recipe.c1 << " exceeds C^2 = "
       << recipe.amplitude * recipe.amplitude;
    throw PreconditionError(os.str());
  }
  AlternativeSequence seq;
  seq.family = family;
  seq.r = r;
  seq.kind = "consistent";
  const BasisKind basis = family_basis(family);
  for (std::size_t n : n_list) {
    const std::size_t k = band_index(family, r, n, profile);
    const double limit = recipe.c2 * static_cast<double>(k);
    // Largest integer frequency strictly below c2 k_n.
    const auto band = static_cast<std::size_t>(std::ceil(limit) - 1.0);
    if (band < 1) throw PreconditionError("make_consistent: band |j| < c2 k_n is empty at n = " + std::to_string(n));
    const double total = recipe.amplitude * recipe.amplitude * std::pow(static_cast<double>(n), -2.0 * r);
    std::vector<double> mass(band, 0.0), signs, angles;
    switch (recipe.profile) {
      case MassProfile::Lowest: mass[0] = total; break;
      case MassProfile::Spread: {
        const std::size_t terms = recipe.max_terms == 0 ? band : std::min(band, recipe.max_terms);
        // Evenly spaced frequencies across the band.
        for (std::size_t t = 0; t < terms; ++t) mass[(t * band) / terms] += total / static_cast<double>(terms);
        break;
      }
      case MassProfile::Random: {
        RngStream rng(recipe.seed, stream_key("make_consistent"), n);
        const std::size_t terms = recipe.max_terms == 0 ? band : std::min(band, recipe.max_terms);
        std::vector<std::size_t> idx(band);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t t = 0; t < terms; ++t) {
          const auto pick = t + static_cast<std::size_t>(rng.uniform() * static_cast<double>(band - t));
          std::swap(idx[t], idx[std::min(pick, band - 1)]);
        }
        double wsum = 0.0;
        std::vector<double> w(terms);
        for (auto& v : w) {
          v = -std::log(rng.uniform());
          wsum += v;
        }
        signs.assign(band, 1.0);
        angles.assign(band, 0.0);
        for (std::size_t t = 0; t < terms; ++t) {
          mass[idx[t]] = total * w[t] / wsum;
          signs[idx[t]] = rng.uniform() < 0.5 ? -1.0 : 1.0;
          angles[idx[t]] = 2.0 * std::numbers::pi * rng.uniform();
        }
        if (basis != BasisKind::TrigFull) angles.clear();
        break;
      }
    }
    seq.entries.push_back({n, k, from_masses(basis, mass, signs, angles)});
  }
  seq.refresh_envelope();
  return seq;
}

AlternativeSequence make_inconsistent(Family family, double r, const InconsistentRecipe& recipe,
                                      std::span<const std::size_t> n_list, const KappaProfile* profile) {
  check_rate(r);
  if (n_list.empty()) throw PreconditionError("make_inconsistent: empty n_list");
  if (recipe.separation.size() != n_list.size())
    throw PreconditionError("make_inconsistent: one separation factor per n is required");
  if (!(recipe.amplitude > 0.0)) throw PreconditionError("make_inconsistent: amplitude must be positive");
  if (recipe.width == 0) throw PreconditionError("make_inconsistent: width must be positive");
  AlternativeSequence seq;
  seq.family = family;
  seq.r = r;
  seq.kind = "inconsistent";
  const BasisKind basis = family_basis(family);
  double prev_ratio = -1.0;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const std::size_t n = n_list[i];
    const std::size_t k = band_index(family, r, n, profile);
    const double sep = recipe.separation[i];
    if (!(sep > 0.0)) throw PreconditionError("make_inconsistent: separation factors must be positive");
    const auto m_n = static_cast<std::size_t>(std::ceil(sep * static_cast<double>(k)));
    const double ratio = static_cast<double>(m_n) / static_cast<double>(k);
    if (!(ratio > prev_ratio)) {
      std::ostringstream os;
      os << "make_inconsistent: schedule m_n/k_n is not diverging (" << ratio << " after " << prev_ratio << ")";
      throw PreconditionError(os.str());
    }
    prev_ratio = ratio;
    const double total = recipe.amplitude * recipe.amplitude * std::pow(static_cast<double>(n), -2.0 * r);
    std::vector<double> mass(m_n + recipe.width - 1, 0.0);
    for (std::size_t w = 0; w < recipe.width; ++w) mass[m_n - 1 + w] = total / static_cast<double>(recipe.width);
    seq.entries.push_back({n, k, from_masses(basis, mass, {})});
  }
  seq.refresh_envelope();
  return seq;
}

std::pair<SignalSpec, SignalSpec> decompose(const SignalSpec& signal, std::size_t cutoff) {
  const auto c = signal.coeffs();
  std::vector<double> head(c.size(), 0.0), tail(c.size(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i)
    (frequency_of(signal.basis(), i) < cutoff ? head : tail)[i] = c[i];
  return {SignalSpec(signal.basis(), std::move(head)), SignalSpec(signal.basis(), std::move(tail))};
}

double head_mass(const SignalSpec& signal, double limit) {
  const auto c = signal.coeffs();
  double s = 0.0;
  for (std::size_t i : signal.support())
    if (static_cast<double>(frequency_of(signal.basis(), i)) < limit) s += c[i] * c[i];
  return s;
}

double far_tail_mass(const SignalSpec& signal, double limit) {
  const auto c = signal.coeffs();
  double s = 0.0;
  for (std::size_t i : signal.support())
    if (static_cast<double>(frequency_of(signal.basis(), i)) > limit) s += c[i] * c[i];
  return s;
}

AlternativeSequence add_sequences(const AlternativeSequence& a, const AlternativeSequence& b) {
  if (a.family != b.family || a.r != b.r || a.entries.size() != b.entries.size())
    throw PreconditionError("add_sequences: sequences must share family, r and n_list");
  AlternativeSequence s;
  s.family = a.family;
  s.r = a.r;
  s.kind = "sum";
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].n != b.entries[i].n) throw PreconditionError("add_sequences: n_list mismatch");
    s.entries.push_back({a.entries[i].n, a.entries[i].k_n, a.entries[i].signal + b.entries[i].signal});
  }
  s.refresh_envelope();
  return s;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::ConsistentWitness: return "consistent-witness";
    case Verdict::InconsistentWitness: return "inconsistent-witness";
    case Verdict::PurelyConsistentWitness: return "purely-consistent-witness";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

Classification classify(const AlternativeSequence& seq, const ClassifyThresholds& th) {
  if (seq.entries.size() < 3) throw PreconditionError("classify: at least three n values are required");
  Classification cl;
  cl.thresholds = th;
  bool con2 = true, con19 = true, decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& e : seq.entries) {
    ClassificationRow row;
    row.n = e.n;
    row.k_n = e.k_n;
    const double scale = std::pow(static_cast<double>(e.n), 2.0 * seq.r);
    row.norm_sq_scaled = e.signal.norm_sq() * scale;
    row.head_scaled = head_mass(e.signal, th.c2 * static_cast<double>(e.k_n)) * scale;
    row.far_tail_scaled = far_tail_mass(e.signal, th.C1 * static_cast<double>(e.k_n)) * scale;
    con2 = con2 && row.head_scaled > th.c1;
    con19 = con19 && row.far_tail_scaled <= th.eps;
    decreasing = decreasing && row.head_scaled <= prev;
    prev = row.head_scaled;
    cl.evidence.push_back(row);
  }
  cl.con2 = con2;
  cl.con3 = decreasing && cl.evidence.back().head_scaled < th.eps;
  cl.con19 = con19;
  if (cl.con2)
    cl.verdict = Verdict::ConsistentWitness;
  else if (cl.con3)
    cl.verdict = Verdict::InconsistentWitness;
  cl.purity = (cl.con2 && cl.con19) ? Verdict::PurelyConsistentWitness : Verdict::Indeterminate;
  return cl;
}

std::vector<DensityCheckRow> densitize(const AlternativeSequence& seq, double cutoff_factor) {
  if (seq.family != Family::Chi2 && seq.family != Family::Cvm)
    throw PreconditionError("densitize applies to the chi2 and cvm families");
  std::vector<DensityCheckRow> out;
  for (const auto& e : seq.entries) {
    DensityCheckRow row;
    row.n = e.n;
    row.cutoff = static_cast<std::size_t>(std::ceil(cutoff_factor * static_cast<double>(e.k_n)));
    const auto [head, tail] = decompose(e.signal, row.cutoff);
    const auto s = check_nonnegative(e.signal);
    const auto h = check_nonnegative(head);
    const auto t = check_nonnegative(tail);
    double abs_sum = 0.0;
    for (std::size_t i : e.signal.support()) abs_sum += std::abs(e.signal.coeffs()[i]);
    row.sufficient_bound = abs_sum * std::numbers::sqrt2 < 1.0;
    row.signal_ok = s.ok;
    row.head_ok = h.ok;
    row.tail_ok = t.ok;
    row.signal_min = s.min_value;
    row.head_min = h.min_value;
    row.tail_min = t.min_value;
    for (const auto* rep : {&s, &h, &t}) row.violations.insert(row.violations.end(), rep->violations.begin(), rep->violations.end());
    out.push_back(row);
  }
  return out;
}

}  // namespace uniconsist
