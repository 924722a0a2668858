#include <benchmark/benchmark.h>

#include <algorithm>
#include <array>
#include <vector>

#include "uniconsist/chi2_test.hpp"
#include "uniconsist/cvm_test.hpp"
#include "uniconsist/function_classes.hpp"
#include "uniconsist/kernel_test.hpp"
#include "uniconsist/mc.hpp"
#include "uniconsist/quad_test.hpp"
#include "uniconsist/rng.hpp"

using namespace uniconsist;

namespace {

std::vector<double> normals(std::size_t count, std::uint64_t seed) {
  RngStream rng(seed, stream_key("bench"), count);
  std::vector<double> v(count);
  for (auto& x : v) x = rng.normal();
  return v;
}

std::vector<double> uniforms(std::size_t count, std::uint64_t seed) {
  RngStream rng(seed, stream_key("bench-u"), count);
  std::vector<double> v(count);
  for (auto& x : v) x = rng.uniform();
  return v;
}

void BM_QuadStatistic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto profile = build_profile(0.25, 2.0, 1.0, {n});
  const auto& level = profile.level(n);
  const auto y = normals(level.J(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(quad_statistic(y, level, 1.0));
}
BENCHMARK(BM_QuadStatistic)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_KernelStatistic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const double h = 1.0 / std::sqrt(static_cast<double>(n));
  const auto cfg = KernelTestConfig::make(Kernel::epanechnikov(), h, NoiseModel::make(1.0, n), 0.05, 0, 4.0);
  const auto y = normals(2 * cfg.J, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_statistic_fourier(y, cfg));
}
BENCHMARK(BM_KernelStatistic)->Arg(1024)->Arg(4096);

void BM_Chi2Statistic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = uniforms(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(chi2_statistic(x, 64));
}
BENCHMARK(BM_Chi2Statistic)->Arg(1024)->Arg(16384);

void BM_CvmStatistic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = uniforms(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(cvm_statistic(x));
}
BENCHMARK(BM_CvmStatistic)->Arg(1024)->Arg(16384);

void BM_CvmNullSample(benchmark::State& state) {
  RngStream rng(5, stream_key("bench-null"), 0);
  const auto J = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cvm_null_sample(J, rng));
}
BENCHMARK(BM_CvmNullSample)->Arg(256)->Arg(1024);

void BM_BesovSeminorm(benchmark::State& state) {
  const SignalSpec f(BasisKind::CosinePi, normals(static_cast<std::size_t>(state.range(0)), 6));
  for (auto _ : state) benchmark::DoNotOptimize(besov_seminorm(f, 0.5));
}
BENCHMARK(BM_BesovSeminorm)->Arg(256)->Arg(4096);

void BM_GreedyWidths(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  EllipsoidSet e;
  for (std::size_t i = 0; i < dim; ++i) e.axes.push_back(1.0 / static_cast<double>(i + 1));
  const SetDescriptor set = e;
  for (auto _ : state) benchmark::DoNotOptimize(greedy_widths(set, dim));
}
BENCHMARK(BM_GreedyWidths)->Arg(8)->Arg(32);

void BM_RunPairedQuad(benchmark::State& state) {
  const std::size_t n = 1024;
  const QuadFamilyTest test(QuadTestConfig::make(build_profile(0.25, 2.0, 1.0, {n}), n, 0.05));
  const auto theta = SignalSpec::spike(BasisKind::CosinePi, 0, 0.05);
  const std::array<Scenario, 2> sc{test.prepare(nullptr), test.prepare(&theta)};
  MCConfig mc;
  mc.replicates = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_paired(test, sc, mc, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunPairedQuad)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
