#include <doctest.h>

#include <cmath>
#include <numbers>

#include "uniconsist/alternatives.hpp"
#include "uniconsist/cvm_test.hpp"
#include "uniconsist/error.hpp"
#include "uniconsist/function_classes.hpp"
#include "uniconsist/quad_test.hpp"
#include "uniconsist/rng.hpp"

using namespace uniconsist;

namespace {

const std::vector<std::size_t> kCvmN{256, 4096, 65536};

double pow_n(std::size_t n, double e) { return std::pow(static_cast<double>(n), e); }

}  // namespace

TEST_CASE("band index rules") {
  CHECK(band_index(Family::Kernel, 0.25, 1024) == 1024);
  CHECK(band_index(Family::Chi2, 0.3, 1000) == static_cast<std::size_t>(std::floor(std::pow(1000.0, 0.8))));
  CHECK(band_index(Family::Cvm, 0.25, 10000) == 10);
  CHECK(band_index(Family::Cvm, 0.5, 10000) == 1);
  CHECK(band_index(Family::Fixed, 0.5, 77) == 1);
  CHECK_THROWS_AS(band_index(Family::Quad, 0.25, 64), PreconditionError);
  CHECK_THROWS_AS(band_index(Family::Kernel, 0.6, 64), PreconditionError);
  const auto p = build_profile(0.25, 2.0, 1.0, {64});
  CHECK(band_index(Family::Quad, 0.25, 64, &p) == p.level(64).k_n);
}

TEST_CASE("consistent sequences: concentration and envelope") {
  const std::vector<std::size_t> ns{256, 1024, 4096};
  const auto p = build_profile(0.25, 2.0, 1.0, ns);
  ConsistentRecipe rec;
  const auto seq = make_consistent(Family::Quad, 0.25, rec, ns, &p);
  CHECK(seq.kind == "consistent");
  CHECK(seq.c_env == doctest::Approx(1.0));
  CHECK(seq.C_env == doctest::Approx(1.0));
  for (const auto& e : seq.entries) {
    CHECK(e.signal.support().size() == 1);
    CHECK(e.signal.support()[0] == 0);
    CHECK(e.signal.norm_sq() == doctest::Approx(pow_n(e.n, -0.5)).epsilon(1e-14));
    CHECK(head_mass(e.signal, rec.c2 * static_cast<double>(e.k_n)) / e.signal.norm_sq() == doctest::Approx(1.0));
  }

  rec.profile = MassProfile::Spread;
  rec.c2 = 1.0;
  const auto spread = make_consistent(Family::Quad, 0.25, rec, ns, &p);
  double lo = 1e300, hi = 0;
  for (const auto& e : spread.entries) {
    CHECK(far_tail_mass(e.signal, rec.c2 * static_cast<double>(e.k_n)) == 0.0);
    CHECK(head_mass(e.signal, rec.c2 * static_cast<double>(e.k_n)) == doctest::Approx(e.signal.norm_sq()));
    const double R = QuadTestConfig::make(p, e.n, 0.05).noncentrality(e.signal);
    lo = std::min(lo, R);
    hi = std::max(hi, R);
  }
  CHECK(lo > 0.2);
  CHECK(hi / lo < 3.0);

  rec.profile = MassProfile::Random;
  rec.max_terms = 5;
  const auto rnd = make_consistent(Family::Cvm, 0.25, rec, kCvmN);
  for (const auto& e : rnd.entries) {
    CHECK(e.signal.support().size() <= 5);
    CHECK(e.signal.norm_sq() == doctest::Approx(pow_n(e.n, -0.5)).epsilon(1e-12));
  }
  CHECK(make_consistent(Family::Cvm, 0.25, rec, kCvmN).entries[2].signal == rnd.entries[2].signal);

  ConsistentRecipe bad;
  bad.c1 = 2.0;
  CHECK_THROWS_AS(make_consistent(Family::Cvm, 0.25, bad, kCvmN), PreconditionError);
  CHECK_THROWS_AS(make_consistent(Family::Cvm, 0.25, ConsistentRecipe{}, std::vector<std::size_t>{}), PreconditionError);
}

TEST_CASE("consistent sequences at r = 1/2 on a finite band") {
  ConsistentRecipe rec;
  rec.c2 = 4.0;  // frequencies 1..3
  rec.profile = MassProfile::Spread;
  rec.amplitude = 2.0;
  const std::vector<std::size_t> ns{10, 100, 1000};
  const auto seq = make_consistent(Family::Fixed, 0.5, rec, ns);
  const auto kappa = FixedKappa::inverse_square(16);
  const double base = kappa.functional(seq.entries[0].signal.scaled(std::sqrt(10.0)));
  for (const auto& e : seq.entries) {
    CHECK(e.k_n == 1);
    CHECK(finite_band_membership(e.signal, FiniteBand{3, 2.0}));
    CHECK(e.signal.support().size() == 3);
    CHECK(kappa.functional(e.signal.scaled(std::sqrt(static_cast<double>(e.n)))) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("inconsistent sequences: separated support") {
  InconsistentRecipe rec;
  rec.separation = {10.0, 20.0, 40.0};
  const auto seq = make_inconsistent(Family::Cvm, 0.25, rec, kCvmN);
  CHECK(seq.kind == "inconsistent");
  for (const auto& e : seq.entries) {
    for (double c2 : {0.5, 1.0, 5.0, 10.0}) CHECK(head_mass(e.signal, c2 * static_cast<double>(e.k_n)) == 0.0);
    CHECK(e.signal.support()[0] + 1 >= 10 * e.k_n);
  }
  const auto idx = cvm_consistency_index(seq);
  CHECK(idx[1] < idx[0]);
  CHECK(idx[2] < idx[1]);

  const std::vector<std::size_t> ns{256, 1024, 4096};
  const auto p = build_profile(0.25, 2.0, 1.0, ns);
  InconsistentRecipe q;
  q.separation = {1.5, 3.0, 6.0};
  const auto quad = make_inconsistent(Family::Quad, 0.25, q, ns, &p);
  double prev = 1e300;
  for (const auto& e : quad.entries) {
    const double R = QuadTestConfig::make(p, e.n, 0.05).noncentrality(e.signal);
    CHECK(R < prev);
    prev = R;
  }

  InconsistentRecipe flat;
  flat.separation = {4.0, 4.0, 4.0};
  CHECK_THROWS_AS(make_inconsistent(Family::Cvm, 0.25, flat, kCvmN), PreconditionError);
  flat.separation = {4.0, 8.0};
  CHECK_THROWS_AS(make_inconsistent(Family::Cvm, 0.25, flat, kCvmN), PreconditionError);
}

TEST_CASE("decompose: worked values, idempotence, Pythagoras") {
  const SignalSpec f(BasisKind::CosinePi, {3.0, 0.0, 0.0, 0.0, 4.0});
  const auto [head, tail] = decompose(f, 3);
  CHECK(std::sqrt(head.norm_sq()) == 3.0);
  CHECK(std::sqrt(tail.norm_sq()) == 4.0);
  CHECK(std::sqrt(f.norm_sq()) == 5.0);

  const auto [all, none] = decompose(f, 100);
  CHECK(all == f);
  CHECK(none.is_zero());

  RngStream rng(31, stream_key("decompose"), 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> c(40);
    for (auto& v : c) v = rng.normal();
    const SignalSpec g(trial % 2 ? BasisKind::TrigFull : BasisKind::CosinePi, c);
    const std::size_t cut = 1 + static_cast<std::size_t>(trial % 25);
    const auto [h, t] = decompose(g, cut);
    CHECK(std::abs(h.norm_sq() + t.norm_sq() - g.norm_sq()) <= 1e-15 * g.norm_sq());
    CHECK(decompose(h, cut).first == h);
    CHECK(decompose(t, cut).second == t);
    CHECK(h + t == g);
    CHECK(besov_seminorm(h, 0.5) <= head_besov_radius(0.5, cut, h.norm_sq()) * (1 + 1e-12));
  }
}

TEST_CASE("classification verdicts") {
  ConsistentRecipe crec;
  const auto con = make_consistent(Family::Cvm, 0.25, crec, kCvmN);
  InconsistentRecipe irec;
  irec.separation = {2.0, 8.0, 32.0};
  const auto inc = make_inconsistent(Family::Cvm, 0.25, irec, kCvmN);
  const ClassifyThresholds th;

  const auto c = classify(con, th);
  CHECK(c.verdict == Verdict::ConsistentWitness);
  CHECK(c.purity == Verdict::PurelyConsistentWitness);
  REQUIRE(c.evidence.size() == 3);
  CHECK(c.evidence[0].head_scaled == doctest::Approx(1.0));

  const auto i = classify(inc, th);
  CHECK(i.verdict == Verdict::InconsistentWitness);
  CHECK_FALSE(i.con2);
  CHECK(i.purity == Verdict::Indeterminate);

  const auto s = classify(add_sequences(con, inc), th);
  CHECK(s.verdict == Verdict::ConsistentWitness);
  CHECK_FALSE(s.con19);
  CHECK(s.purity == Verdict::Indeterminate);
  CHECK(s.evidence[2].far_tail_scaled >= th.eps);

  AlternativeSequence short_seq = con;
  short_seq.entries.pop_back();
  CHECK_THROWS_AS(classify(short_seq, th), PreconditionError);
  CHECK(to_string(Verdict::InconsistentWitness) == "inconsistent-witness");
}

TEST_CASE("densitize") {
  AlternativeSequence seq;
  seq.family = Family::Cvm;
  seq.r = 0.25;
  for (std::size_t n : kCvmN) seq.entries.push_back({n, 4, SignalSpec(BasisKind::CosinePi, {0.3, 0.0, 0.0, 0.0, 0.2})});
  for (const auto& row : densitize(seq)) {
    CHECK(row.sufficient_bound);
    CHECK(row.signal_ok);
    CHECK(row.head_ok);
    CHECK(row.tail_ok);
  }

  for (auto& e : seq.entries) e.signal = SignalSpec(BasisKind::CosinePi, {1.2});
  for (const auto& row : densitize(seq)) {
    CHECK_FALSE(row.signal_ok);
    REQUIRE_FALSE(row.violations.empty());
    const double onset = std::acos(-1.0 / (1.2 * std::sqrt(2.0))) / std::numbers::pi;
    for (double t : row.violations) CHECK(t > onset);
    CHECK(row.signal_min == doctest::Approx(1.0 - 1.2 * std::sqrt(2.0)).epsilon(1e-6));
  }
  for (auto& e : seq.entries) e.signal = e.signal.scaled(0.5);
  for (const auto& row : densitize(seq)) CHECK(row.signal_ok);

  seq.family = Family::Quad;
  CHECK_THROWS_AS(densitize(seq), PreconditionError);
}
