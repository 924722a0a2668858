#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "uniconsist/alternatives.hpp"
#include "uniconsist/cvm_test.hpp"
#include "uniconsist/error.hpp"
#include "uniconsist/rng.hpp"

using namespace uniconsist;

namespace {

std::function<double(double)> as_function(const SignalSpec& f) {
  std::vector<double> c(f.coeffs().begin(), f.coeffs().end());
  return [c](double t) { return oracle::direct_sum(0, c, t); };
}

SignalSpec random_cosine(std::size_t coords, std::uint64_t seed) {
  RngStream rng(seed, stream_key("cvm-signal"), coords);
  std::vector<double> c(coords);
  for (std::size_t i = 0; i < coords; ++i) c[i] = rng.normal() / static_cast<double>(i + 1);
  return SignalSpec(BasisKind::CosinePi, c);
}

}  // namespace

TEST_CASE("statistic: worked values") {
  CHECK(cvm_statistic(std::vector<double>{0.5}) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  for (std::size_t n : {1u, 7u, 100u}) {
    std::vector<double> u;
    for (std::size_t i = 1; i <= n; ++i) u.push_back((2.0 * static_cast<double>(i) - 1.0) / (2.0 * static_cast<double>(n)));
    CHECK(cvm_statistic(u) == doctest::Approx(1.0 / (12.0 * static_cast<double>(n))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cvm_statistic(std::vector<double>{}), PreconditionError);
  CHECK_THROWS_AS(cvm_statistic(std::vector<double>{0.2, 1.0}), DomainError);
}

TEST_CASE("statistic: order-statistics formula equals the defining integral") {
  RngStream rng(17, stream_key("cvm-quad"), 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> u(5 + static_cast<std::size_t>(trial) * 7);
    for (auto& v : u) v = rng.uniform();
    CHECK(std::abs(cvm_statistic(u) - oracle::cvm_by_quadrature(u)) < 1e-10);
  }
}

TEST_CASE("population functional: series form against double-integral quadrature") {
  const double pi2 = oracle::kPi * oracle::kPi;
  CHECK(cvm_population(SignalSpec::zero(BasisKind::CosinePi, 3)) == 0.0);
  const auto e1 = SignalSpec::spike(BasisKind::CosinePi, 0, 1.0);
  const auto e2 = SignalSpec::spike(BasisKind::CosinePi, 1, 1.0);
  CHECK(cvm_population(e1) == doctest::Approx(1.0 / pi2).epsilon(1e-15));
  CHECK(cvm_population(e2) == doctest::Approx(1.0 / (4.0 * pi2)).epsilon(1e-15));
  CHECK(std::abs(oracle::cvm_double_integral(as_function(e1)) - 1.0 / pi2) < 1e-8 / pi2);
  CHECK(std::abs(oracle::cvm_double_integral(as_function(e2)) - 1.0 / (4.0 * pi2)) < 1e-8 / pi2);

  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto f = random_cosine(2 + k % 12, 60 + k);
    const double series = cvm_population(f);
    CHECK(std::abs(oracle::cvm_double_integral(as_function(f)) - series) <= 1e-8 * series);
  }
  CHECK_THROWS_AS(cvm_population(SignalSpec(BasisKind::TrigFull, {1.0, 0.0})), PreconditionError);
}

// The bridge covariance min(s,t) - st misses the term (int s f(s) ds)^2 for
// cosine expansions; it reproduces the series only for sine expansions.
TEST_CASE("population functional: bridge-kernel form differs by the first moment") {
  const double pi2 = oracle::kPi * oracle::kPi;
  const auto e1 = SignalSpec::spike(BasisKind::CosinePi, 0, 1.0);
  CHECK(oracle::bridge_double_integral(as_function(e1)) == doctest::Approx(1.0 / pi2 - 8.0 / (pi2 * pi2)).epsilon(1e-9));
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto f = random_cosine(6, 200 + k);
    const auto fn = as_function(f);
    const double moment = oracle::gl20().integrate([&](double s) { return s * fn(s); }, 0.0, 1.0, 32);
    CHECK(oracle::bridge_double_integral(fn) ==
          doctest::Approx(cvm_population(f) - moment * moment).epsilon(1e-8));
  }
  const auto sine = [](double t) { return oracle::kSqrt2 * std::sin(oracle::kPi * t); };
  CHECK(oracle::bridge_double_integral(sine) == doctest::Approx(1.0 / pi2).epsilon(1e-9));
}

TEST_CASE("null series: mean, tail bound and shifts") {
  const std::size_t J = 64;
  double truncated = 0;
  for (std::size_t j = 1; j <= J; ++j) truncated += 1.0 / (oracle::kPi * oracle::kPi * static_cast<double>(j * j));
  CHECK(truncated < 1.0 / 6.0);
  CHECK(1.0 / 6.0 - truncated <= cvm_null_tail_bound(J));

  RngStream rng(23, stream_key("cvm-null-mean"), 0);
  const int reps = 200000;
  double s = 0;
  for (int i = 0; i < reps; ++i) s += cvm_null_sample(J, rng);
  // Var of one draw is sum 2 / (pi j)^4 < 2/90.
  CHECK(std::abs(s / reps - truncated) < 4 * std::sqrt(2.0 / 90.0 / reps));

  const auto f = SignalSpec(BasisKind::CosinePi, {0.3, -0.2});
  const auto shift = cvm_shift(f, 100);
  CHECK(shift[0] == doctest::Approx(10 * 0.3 / oracle::kPi));
  CHECK(shift[1] == doctest::Approx(-10 * 0.2 / (2 * oracle::kPi)));
  CHECK_THROWS_AS(cvm_null_sample(0, rng), PreconditionError);
}

TEST_CASE("null table: monotone, reproducible, thread independent") {
  const auto a = generate_cvm_null_table({0.01, 0.05, 0.1}, 256, 5000, 7, 1);
  const auto b = generate_cvm_null_table({0.1, 0.05, 0.01}, 256, 5000, 7, 3);
  REQUIRE(a.alphas.size() == 3);
  CHECK(a.alphas == b.alphas);
  CHECK(a.critical == b.critical);
  // Sorted by decreasing alpha, so the critical values increase.
  CHECK(a.alphas.front() == 0.1);
  CHECK(a.critical[0] < a.critical[1]);
  CHECK(a.critical[1] < a.critical[2]);
  CHECK(a.critical_value(0.05) == a.critical[1]);
  CHECK_THROWS_AS(a.critical_value(0.2), PreconditionError);
  CHECK(generate_cvm_null_table({0.05}, 256, 5000, 8).critical != a.critical);
  CHECK_THROWS_AS(generate_cvm_null_table({0.05}, 256, 50, 7), PreconditionError);
  CHECK_THROWS_AS(generate_cvm_null_table({}, 256, 500, 7), PreconditionError);

  std::vector<double> draws;
  for (int i = 1; i <= 100; ++i) draws.push_back(i);
  CHECK(empirical_upper_quantile(draws, 0.05) == 95.0);
}

TEST_CASE("null table critical value matches a finite-n simulation") {
  const auto table = generate_cvm_null_table({0.05}, 1024, 100000, 11);
  RngStream rng(12, stream_key("cvm-finite-n"), 0);
  const int reps = 20000;
  int above = 0;
  std::vector<double> u(1000);
  for (int r = 0; r < reps; ++r) {
    for (auto& v : u) v = rng.uniform();
    above += cvm_statistic(u) > table.critical[0];
  }
  const double rate = static_cast<double>(above) / reps;
  // Simulation SE 0.0015 plus table noise of about 0.0007 in rate.
  CHECK(std::abs(rate - 0.05) < 0.0065);
}

TEST_CASE("consistency index and G1 gate") {
  AlternativeSequence seq;
  seq.family = Family::Cvm;
  seq.r = 0.25;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    const auto k_n = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.25)));
    seq.entries.push_back({n, k_n, SignalSpec::spike(BasisKind::CosinePi, 0, std::pow(static_cast<double>(n), -0.25))});
  }
  const auto idx = cvm_consistency_index(seq);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double n = static_cast<double>(seq.entries[i].n);
    CHECK(idx[i] == doctest::Approx(std::sqrt(n) / (oracle::kPi * oracle::kPi)).epsilon(1e-12));
    if (i > 0) CHECK(idx[i] > idx[i - 1]);
  }

  // Mass at j = k_n: n ||f||^2 / k_n^2 stays of order one.
  AlternativeSequence band = seq;
  for (auto& e : band.entries) {
    const double n = static_cast<double>(e.n);
    e.signal = SignalSpec::spike(BasisKind::CosinePi, e.k_n - 1, std::pow(n, -0.25));
  }
  const auto bidx = cvm_consistency_index(band);
  for (double v : bidx) CHECK((v > 0.01 && v < 1.0));

  const auto g1 = g1_gate(band, 0.5, 0.5);
  for (std::size_t i = 0; i < g1.size(); ++i) {
    // c_eps k_n <= k_n, so the band below it misses the single spike.
    CHECK(g1[i].value == 0.0);
    CHECK(g1[i].ok);
  }
  const auto g1_low = g1_gate(seq, 0.5, 1.0);
  for (std::size_t i = 0; i < g1_low.size(); ++i) {
    const double n = static_cast<double>(seq.entries[i].n);
    CHECK(g1_low[i].value == doctest::Approx(std::sqrt(n)));
    CHECK_FALSE(g1_low[i].ok);
  }
}
