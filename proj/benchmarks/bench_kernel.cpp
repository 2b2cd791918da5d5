// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "isacbeam/sensing.hpp"

namespace {

using namespace isacbeam;

void BM_BuildKernel(benchmark::State& state) {
    const int nodes = static_cast<int>(state.range(0));
    const ArrayConfig array{10, 12, 8};
    const AngularPrior prior{-0.3, 1e-3};
    const QuadratureGrid grid = quadrature_grid(prior, nodes);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            build_kernel(prior, grid, array, ReflectionPrior{2e-14}, 25, 1e-12));
    }
}
BENCHMARK(BM_BuildKernel)->Arg(64)->Arg(200)->Arg(400);

void BM_PcrbEval(benchmark::State& state) {
    const ArrayConfig array{10, 12, 8};
    const AngularPrior prior{-0.3, 1e-3};
    const SensingKernel kernel = build_kernel(prior, quadrature_grid(prior, 200),
                                              array, ReflectionPrior{2e-14}, 25, 1e-12);
    const MatC w = 0.1 * MatC::Identity(10, 10);
    for (auto _ : state) benchmark::DoNotOptimize(pcrb_theta(kernel, w));
}
BENCHMARK(BM_PcrbEval);

}  // namespace
