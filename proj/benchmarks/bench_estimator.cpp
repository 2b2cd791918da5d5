// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "isacbeam/estimator.hpp"

namespace {

using namespace isacbeam;

void BM_MapEstimate(benchmark::State& state) {
    const int grid_points = static_cast<int>(state.range(0));
    const ArrayConfig array{10, 12, 8};
    const AngularPrior prior{-0.5, 1e-3};
    const SensingKernel kernel = build_kernel(prior, quadrature_grid(prior, 128),
                                              array, ReflectionPrior{2e-14}, 25, 1e-12);
    Eigen::SelfAdjointEigenSolver<MatC> es(kernel.a1);
    const VecC q1 = es.eigenvectors().col(9);
    const MatC w = 10.0 * (q1 * q1.adjoint());
    const EchoBatch batch = simulate_echo(w, -0.5, cxd(1e-7, 1e-7), kernel, 25, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            map_estimate(batch, prior, ReflectionPrior{2e-14}, grid_points));
}
BENCHMARK(BM_MapEstimate)->Arg(1001)->Arg(4001)->Unit(benchmark::kMillisecond);

}  // namespace
