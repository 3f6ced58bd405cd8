#include <benchmark/benchmark.h>

#include "polarlab/classical.hpp"
#include "polarlab/decoders.hpp"
#include "polarlab/polar.hpp"
#include "polarlab/rng.hpp"

using namespace polarlab;

namespace {

struct Fixture {
    Construction c;
    std::vector<LlrVector> frames;

    Fixture(int N, int K, int m, double snr_db) {
        Construction base = run_abstract_construction(N, K, ga_ops(SnrDb{snr_db}), SnrDb{snr_db});
        c = construction_from_frozen(make_code_spec(N, K, m, m ? "0x3" : ""), base.frozen_set);
        Rng rng(7);
        for (int f = 0; f < 64; ++f) {
            BitVector info(static_cast<std::size_t>(c.spec.info_bits()));
            for (auto& b : info)
                b = static_cast<std::uint8_t>(rng.bit());
            frames.push_back(transmit(encode(c, info), SnrDb{snr_db}, rng));
        }
    }
};

void BM_cascl_decode(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const int L = static_cast<int>(state.range(1));
    Fixture fx(N, N / 2, 4, 2.5);
    ListDecoder dec(fx.c, L);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& cands = dec.decode(fx.frames[i++ % fx.frames.size()]);
        benchmark::DoNotOptimize(cascl_select(cands, fx.c).path_metric);
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_sc_decode(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    Fixture fx(N, N / 2, 0, 2.5);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sc_decode(fx.frames[i++ % fx.frames.size()], fx.c).path_metric);
    }
    state.SetItemsProcessed(state.iterations());
}

} // namespace

BENCHMARK(BM_cascl_decode)
    ->Args({64, 1})
    ->Args({64, 4})
    ->Args({64, 8})
    ->Args({128, 8})
    ->Args({1024, 4});
BENCHMARK(BM_sc_decode)->Arg(64)->Arg(1024);
