#include <benchmark/benchmark.h>

#include <gmpxx.h>

#include <vector>

#include "scslab/experiments/experiments.hpp"
#include "scslab/qarith/hecke.hpp"
#include "scslab/qarith/modular_forms.hpp"
#include "scslab/qarith/ntt.hpp"
#include "scslab/special/bessel.hpp"
#include "scslab/special/kloosterman.hpp"
#include "scslab/sums/sums.hpp"

using namespace scslab;

static void NttMultiply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<mpz_class> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = mpz_class(1) << (i % 200);
    b[i] = -static_cast<long>(i * 7919 % 100003);
  }
  for (auto _ : state) benchmark::DoNotOptimize(qarith::ntt::multiply(a, b, 2 * n - 1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(NttMultiply)->RangeMultiplier(4)->Range(1 << 8, 1 << 14)->Complexity()->Unit(benchmark::kMillisecond);

static void DeltaExpansion(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(qarith::delta_qexp(static_cast<std::size_t>(state.range(0))));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(DeltaExpansion)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity()->Unit(benchmark::kMillisecond);

static void HeckeEigenforms(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(qarith::hecke_eigenforms(static_cast<int>(state.range(0)), 10000));
}
BENCHMARK(HeckeEigenforms)->Arg(24)->Arg(48)->Arg(60)->Unit(benchmark::kMillisecond);

static void KloostermanUncached(benchmark::State& state) {
  const auto c = state.range(0);
  std::int64_t m = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::kloosterman(m, 3, c));
    m = m % 97 + 1;
  }
}
BENCHMARK(KloostermanUncached)->Arg(101)->Arg(1009)->Arg(10007)->Unit(benchmark::kMicrosecond);

static void KloostermanTableHit(benchmark::State& state) {
  special::KloostermanTable table;
  for (std::int64_t c = 1; c <= 200; ++c) table(1, 2, c);
  std::int64_t c = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(table(1, 2, c));
    c = c % 200 + 1;
  }
}
BENCHMARK(KloostermanTableHit);

static void BesselJ(benchmark::State& state) {
  const int nu = static_cast<int>(state.range(0));
  const double x = static_cast<double>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(special::bessel_j(nu, x));
}
BENCHMARK(BesselJ)
    ->Args({11, 5})
    ->Args({11, 500})
    ->Args({999, 100})
    ->Args({999, 1500})
    ->Args({99999, 50000})
    ->Unit(benchmark::kMicrosecond);

static void SmoothSum(benchmark::State& state) {
  static const auto f = qarith::hecke_eigenforms(12, 2000010)[0];
  const auto W = sums::make_window(sums::WindowKind::SmoothBump, 1.0, 2.0);
  const double X = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sums::smooth_sum(f, X, 1, W));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(SmoothSum)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity()->Unit(benchmark::kMicrosecond);

static void VariancePetersson(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto W = sums::make_window(sums::WindowKind::SmoothBump, 1.0, 2.0);
  const double X = static_cast<double>(state.range(1));
  for (auto _ : state) {
    special::KloostermanTable table;
    benchmark::DoNotOptimize(experiments::variance_lhs_petersson(k, 1, 1, W, W, X, 1e-12, &table));
  }
}
BENCHMARK(VariancePetersson)->Args({24, 5})->Args({1000, 10})->Args({1000, 30})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
