#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "adastrat/allocation.hpp"
#include "adastrat/estimator.hpp"
#include "adastrat/experiments.hpp"
#include "adastrat/finance.hpp"
#include "adastrat/normal_strata.hpp"
#include "adastrat/rng.hpp"

using namespace adastrat;

namespace {

void BM_NormalQuantile(benchmark::State& state) {
  Rng rng(1, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(normal_quantile(rng.uniform01()));
}
BENCHMARK(BM_NormalQuantile);

void BM_ConditionalSample1D(benchmark::State& state) {
  const auto strata = QuantileStrata1D::equiprobable(10);
  Rng rng(2, 0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(strata.sample(i, rng));
    i = (i + 1) % 10;
  }
}
BENCHMARK(BM_ConditionalSample1D);

void BM_SlabSample(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  std::vector<double> u(d, 0.0);
  double norm = 0.0;
  for (std::size_t m = 0; m < d; ++m) {
    u[m] = static_cast<double>(d - m);
    norm += u[m] * u[m];
  }
  norm = std::sqrt(norm);
  for (auto& v : u) v /= norm;

  const SlabStrata slabs(u, 100);
  Rng rng(3, 0);
  std::vector<double> x(d);
  std::size_t i = 0;
  for (auto _ : state) {
    slabs.sample(i, rng, x);
    benchmark::DoNotOptimize(x.data());
    i = (i + 1) % 100;
  }
}
BENCHMARK(BM_SlabSample)->Arg(16)->Arg(64);

void BM_WaterfillAllocate(benchmark::State& state) {
  const std::size_t count = 100;
  WaterfillProblem prob;
  prob.n.resize(count);
  prob.alpha.resize(count);
  Rng rng(4, 0);
  for (std::size_t i = 0; i < count; ++i) {
    prob.n[i] = static_cast<double>(1 + rng.next_u64() % 50);
    prob.alpha[i] = 0.01 + rng.uniform01();
  }
  prob.budget = 40000;
  for (auto _ : state)
    benchmark::DoNotOptimize(waterfill_allocate(prob));
}
BENCHMARK(BM_WaterfillAllocate);

void BM_SystematicRound(benchmark::State& state) {
  std::vector<double> m(100);
  Rng rng(5, 0);
  double total = 0.0;
  for (auto& v : m) total += v = rng.uniform01();
  for (auto& v : m) v *= 1000.0 / total;
  for (auto _ : state)
    benchmark::DoNotOptimize(systematic_round(m));
}
BENCHMARK(BM_SystematicRound);

void BM_ShiftedIntegrand(benchmark::State& state) {
  const auto d = static_cast<std::int64_t>(state.range(0));
  const AsianSpec spec = default_asian_spec(d, 45.0, OptionKind::Call);
  const auto mu = find_is_shift(spec);
  const ShiftedIntegrand f(spec, mu);
  Rng rng(6, 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  for (auto _ : state) {
    for (auto& v : x) v = standard_normal(rng);
    benchmark::DoNotOptimize(f(x));
  }
}
BENCHMARK(BM_ShiftedIntegrand)->Arg(16)->Arg(64);

void BM_AdaptiveToyRun(benchmark::State& state) {
  const auto strat =
      normal_identity_stratification(QuantileStrata1D::equiprobable(10));
  const Schedule schedule(default_toy_schedule());
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_adaptive(strat, schedule, AllocationRule::B, ++seed));
  }
}
BENCHMARK(BM_AdaptiveToyRun);

}  // namespace

BENCHMARK_MAIN();
