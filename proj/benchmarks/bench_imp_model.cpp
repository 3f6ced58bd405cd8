#include <benchmark/benchmark.h>

#include "polarlab/imp_model.hpp"
#include "polarlab/imp_runner.hpp"

using namespace polarlab;

namespace {

void BM_imp_forward(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    ImpParams params = imp_init_params(ImpHyper{}, 1);
    PccmpGraph graph = build_pccmp(N, SnrDb{2.0});
    for (auto _ : state)
        benchmark::DoNotOptimize(imp_score(graph, params, 0.5).z.sum());
    state.SetItemsProcessed(state.iterations());
}

void BM_imp_forward_backward(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    ImpParams params = imp_init_params(ImpHyper{}, 1);
    PccmpGraph graph = build_pccmp(N, SnrDb{2.0});
    Eigen::VectorXd dz = Eigen::VectorXd::Constant(N, 0.1);
    ForwardCache cache;
    for (auto _ : state) {
        imp_score(graph, params, 0.5, &cache);
        benchmark::DoNotOptimize(imp_backward(graph, params, dz, cache).emb.sum());
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_construct_imp(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    ImpParams params = imp_init_params(ImpHyper{}, 1);
    CodeSpec spec = make_code_spec(N, N / 2, 4, "0x3");
    for (auto _ : state)
        benchmark::DoNotOptimize(construct_imp(spec, SnrDb{2.0}, params).info_set.size());
    state.SetItemsProcessed(state.iterations());
}

} // namespace

BENCHMARK(BM_imp_forward)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_imp_forward_backward)->Arg(32)->Arg(64);
BENCHMARK(BM_construct_imp)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
