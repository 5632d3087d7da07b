// Serial reference runners against their OpenMP counterparts, plus the exact
// kernels that dominate the CLI's running time. Thread count is the benchmark
// argument for the parallel variants.

#include <benchmark/benchmark.h>

#include "ruin/brownian.hpp"
#include "ruin/decomposition.hpp"
#include "ruin/markov_exact.hpp"
#include "ruin/simulation.hpp"

namespace {

using namespace ruin;

constexpr std::uint64_t kTrials = 200'000;

void BM_WalksSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(run_walks_serial({{0.4, 5}, kTrials, 7, 1}));
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * kTrials));
}
BENCHMARK(BM_WalksSerial)->Unit(benchmark::kMillisecond);

void BM_WalksOmp(benchmark::State& st) {
  const int workers = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(run_walks({{0.4, 5}, kTrials, 7, workers}));
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * kTrials));
}
BENCHMARK(BM_WalksOmp)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_CoupledSerial(benchmark::State& st) {
  const CoupledRunConfig cfg{0.2, 0.5, 5, 1, kTrials, 11, 1};
  for (auto _ : st) benchmark::DoNotOptimize(run_coupled_serial(cfg));
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * kTrials));
}
BENCHMARK(BM_CoupledSerial)->Unit(benchmark::kMillisecond);

void BM_CoupledOmp(benchmark::State& st) {
  const CoupledRunConfig cfg{0.2, 0.5, 5, 1, kTrials, 11, static_cast<int>(st.range(0))};
  for (auto _ : st) benchmark::DoNotOptimize(run_coupled(cfg));
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * kTrials));
}
BENCHMARK(BM_CoupledOmp)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_EulerSerial(benchmark::State& st) {
  EulerExitConfig cfg;
  cfg.mu = 0.5;
  cfg.paths = 2'000;
  cfg.seed = 3;
  for (auto _ : st) benchmark::DoNotOptimize(simulate_exit_euler_serial(cfg));
}
BENCHMARK(BM_EulerSerial)->Unit(benchmark::kMillisecond);

void BM_EulerOmp(benchmark::State& st) {
  EulerExitConfig cfg;
  cfg.mu = 0.5;
  cfg.paths = 2'000;
  cfg.seed = 3;
  cfg.workers = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_exit_euler(cfg));
}
BENCHMARK(BM_EulerOmp)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

const std::vector<double> kMus{0, 0.25, 0.5, 0.75, 1, 1.25, 1.5, 1.75, 2};
const std::vector<double> kTimes{0.25, 0.5, 1, 2, 4};

void BM_SweepSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(monotonicity_sweep_serial(1.0, kMus, kTimes, 1e-10));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);

void BM_SweepOmp(benchmark::State& st) {
  const int workers = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(monotonicity_sweep(1.0, kMus, kTimes, 1e-10, workers));
}
BENCHMARK(BM_SweepOmp)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_DurationPmfDouble(benchmark::State& st) {
  const int horizon = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(duration_pmf(WalkParams<double>{0.45, 8}, horizon));
}
BENCHMARK(BM_DurationPmfDouble)->Arg(100)->Arg(1000)->Arg(10000);

void BM_DurationPmfExact(benchmark::State& st) {
  const int horizon = static_cast<int>(st.range(0));
  const WalkParams<Rational> w{Rational(9, 20), 8};
  for (auto _ : st) benchmark::DoNotOptimize(duration_pmf(w, horizon));
}
BENCHMARK(BM_DurationPmfExact)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ReconstructSubgameExact(benchmark::State& st) {
  const WalkParams<Rational> w{Rational(3, 10), 5};
  for (auto _ : st) benchmark::DoNotOptimize(reconstruct_subgame(w, 60));
}
BENCHMARK(BM_ReconstructSubgameExact)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
