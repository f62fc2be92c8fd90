#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "retint/intervals.hpp"
#include "retint/memory.hpp"
#include "retint/scaling.hpp"
#include "retint/surrogate.hpp"

namespace {

using namespace retint;

std::vector<double> lognormal_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (double& x : out) x = dist(rng);
  return out;
}

SeFit bench_fit() {
  SeFit fit;
  fit.alpha = 1.3;
  fit.gamma = 0.31;
  fit.c = fit.c_normalized = se_normalization(fit.alpha, fit.gamma);
  fit.c_constrained = true;
  return fit;
}

void BM_ExtractIntervals(benchmark::State& state) {
  const auto series = lognormal_series(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_intervals(series, 2.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtractIntervals)->Range(1 << 14, 1 << 20);

void BM_KsTwoSample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = lognormal_series(n, 2);
  const auto b = lognormal_series(n, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ks_two_sample(a, b, 0.05));
  }
}
BENCHMARK(BM_KsTwoSample)->Range(1 << 10, 1 << 16);

void BM_Fgn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fgn(0.8, n, ++seed));
  }
}
BENCHMARK(BM_Fgn)->Range(1 << 12, 1 << 17);

void BM_SampleSe(benchmark::State& state) {
  const SeFit fit = bench_fit();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_se(fit, static_cast<std::size_t>(state.range(0)), ++seed));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleSe)->Range(1 << 8, 1 << 12);

void BM_KsGof(benchmark::State& state) {
  const SeFit fit = bench_fit();
  const auto sample = sample_se(fit, static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ks_gof(sample, fit));
  }
}
BENCHMARK(BM_KsGof)->Range(1 << 8, 1 << 12);

void BM_Dfa(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto series = lognormal_series(n, 5);
  const auto windows = log_spaced_windows(4, static_cast<std::int64_t>(n) / 4, 20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dfa(series, windows));
  }
}
BENCHMARK(BM_Dfa)->Range(1 << 12, 1 << 17);

void BM_FitStretchedExponential(benchmark::State& state) {
  const SeFit truth = bench_fit();
  ScaledIntervals sample;
  sample.values = sample_se(truth, static_cast<std::size_t>(state.range(0)), 11);
  const std::vector<ScaledIntervals> pool{sample};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_stretched_exponential(pool));
  }
}
BENCHMARK(BM_FitStretchedExponential)->Range(1 << 10, 1 << 15);

}  // namespace

BENCHMARK_MAIN();
