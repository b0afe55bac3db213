#include "synact/flow/flow.hpp"
#include "synact/rng.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace synact;

namespace {

GrayImage pattern(int size, double shift) {
    GrayImage g(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            g.at(x, y) = static_cast<float>(0.5 + 0.25 * std::sin(0.09 * (x - shift) + 0.05 * y) +
                                            0.25 * std::cos(0.04 * (x - shift) - 0.11 * y));
    return g;
}

}  // namespace

static void BM_Tvl1Pair(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const GrayImage a = pattern(size, 0), b = pattern(size, 3);
    for (auto _ : state) benchmark::DoNotOptimize(tvl1_flow(a, b));
}
BENCHMARK(BM_Tvl1Pair)->Arg(112)->Arg(224)->Unit(benchmark::kMillisecond);
