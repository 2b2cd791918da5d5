// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "isacbeam/channel.hpp"
#include "isacbeam/optimizer.hpp"

namespace {

using namespace isacbeam;

ProblemSpec desk_spec(int k, double rate_target) {
    const ArrayConfig array{10, 12, 8};
    const AngularPrior target{-0.3, 1e-3};
    ProblemSpec spec;
    spec.kernel = build_kernel(target, quadrature_grid(target, 200), array,
                               ReflectionPrior{2e-14}, 25, 1e-12);
    const auto support = default_user_support(-0.3, 1e-3);
    spec.ensemble = generate_ensemble(
        discretize_user_pmf(-0.3, 1e-3, k, support.first, support.second), array,
        ChannelParams{}, 1);
    spec.power_budget = 1.0;
    spec.rate_target = rate_target;
    return spec;
}

void BM_ExpectedRateGradientStep(benchmark::State& state) {
    const ProblemSpec spec = desk_spec(static_cast<int>(state.range(0)), 10.0);
    const MatC w = 0.1 * MatC::Identity(10, 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(expected_rate(w, spec.ensemble));
    }
}
BENCHMARK(BM_ExpectedRateGradientStep)->Arg(20)->Arg(100);

void BM_SolveCase1(benchmark::State& state) {
    const ProblemSpec spec = desk_spec(20, 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_p1(spec));
}
BENCHMARK(BM_SolveCase1);

void BM_SolveCase2(benchmark::State& state) {
    const ProblemSpec spec = desk_spec(static_cast<int>(state.range(0)), 10.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_p1(spec));
}
BENCHMARK(BM_SolveCase2)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
