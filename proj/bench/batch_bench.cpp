#include <benchmark/benchmark.h>

#include "accflow/harness/batch.hpp"

using namespace accflow;

namespace {

std::vector<harness::Scenario> batch(size_t n) {
    std::vector<harness::Scenario> out;
    for (size_t i = 0; i < n; ++i) {
        harness::Scenario s = harness::make_preset("setting-one", {.attackers = 10, .seed = 1 + i});
        s.duration = sim::SimTime::sec(8);
        out.push_back(s);
    }
    return out;
}

void BM_BatchSerial(benchmark::State& state) {
    const auto scenarios = batch(static_cast<size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(harness::run_batch_serial(scenarios));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchParallel(benchmark::State& state) {
    const auto scenarios = batch(static_cast<size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(harness::run_batch(scenarios));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
