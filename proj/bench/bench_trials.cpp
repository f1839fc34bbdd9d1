#include <benchmark/benchmark.h>

#include "muxphoton/mux_sim.hpp"
#include "muxphoton/scenarios.hpp"

namespace {

void BM_TrialsSerial(benchmark::State& state) {
  const auto c = muxphoton::preset("paper-p35-400ns");
  for (auto _ : state) {
    benchmark::DoNotOptimize(muxphoton::run_trials_serial(c.sim, state.range(0), muxphoton::kDefaultSeed));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrialsParallel(benchmark::State& state) {
  const auto c = muxphoton::preset("paper-p35-400ns");
  for (auto _ : state) {
    benchmark::DoNotOptimize(muxphoton::run_trials(c.sim, state.range(0), muxphoton::kDefaultSeed));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_TrialsSerial)->Arg(100'000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TrialsParallel)->Arg(100'000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
