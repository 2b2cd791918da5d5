// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "isacbeam/association.hpp"
#include "isacbeam/rng.hpp"

namespace {

using namespace isacbeam;

void BM_Hungarian(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(5);
    MatD cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform(0.0, 100.0);
    for (auto _ : state) benchmark::DoNotOptimize(assign_min_cost(cost));
}
BENCHMARK(BM_Hungarian)->Arg(8)->Arg(32)->Arg(128);

}  // namespace
