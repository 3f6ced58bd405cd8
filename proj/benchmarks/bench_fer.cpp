#include <benchmark/benchmark.h>

#include "polarlab/classical.hpp"
#include "polarlab/fer.hpp"

using namespace polarlab;

namespace {

void BM_estimate_fer(benchmark::State& state) {
    const int workers = static_cast<int>(state.range(0));
    Construction base = run_abstract_construction(64, 32, ga_ops(SnrDb{2.0}), SnrDb{2.0});
    Construction c = construction_from_frozen(make_code_spec(64, 32, 4, "0x3"), base.frozen_set);
    StopRule rule = StopRule::training(1'000'000, 16'384); // fixed 16k frames
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_fer(c, 4, SnrDb{2.0}, rule, seed++, workers).fer);
    state.SetItemsProcessed(state.iterations() * 16'384);
}

} // namespace

BENCHMARK(BM_estimate_fer)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
