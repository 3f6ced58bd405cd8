#include <benchmark/benchmark.h>

#include "polarlab/crc.hpp"
#include "polarlab/polar.hpp"
#include "polarlab/rng.hpp"

using namespace polarlab;

namespace {

void BM_polar_transform(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    Rng rng(1);
    BitVector u(static_cast<std::size_t>(N));
    for (auto& b : u)
        b = static_cast<std::uint8_t>(rng.bit());
    for (auto _ : state) {
        polar_transform(u);
        benchmark::DoNotOptimize(u.data());
    }
    state.SetItemsProcessed(state.iterations() * N);
}

void BM_crc32(benchmark::State& state) {
    CrcPoly poly = parse_crc_poly("0x04C11DB7", 32);
    Rng rng(2);
    BitVector msg(480);
    for (auto& b : msg)
        b = static_cast<std::uint8_t>(rng.bit());
    for (auto _ : state)
        benchmark::DoNotOptimize(crc_compute(msg, poly));
    state.SetItemsProcessed(state.iterations() * static_cast<int>(msg.size()));
}

} // namespace

BENCHMARK(BM_polar_transform)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_crc32);
