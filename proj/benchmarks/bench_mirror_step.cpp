#include <benchmark/benchmark.h>

#include "relsmooth/bregman.hpp"

using namespace relsmooth;

namespace {

Vector ramp(Index n, double lo, double hi) {
    return Vector::LinSpaced(n, lo, hi);
}

void BM_MirrorStepQuartic(benchmark::State& state) {
    const Index n = state.range(0);
    const auto h = ReferenceFunction::uniform(n, Component::quadratic_plus_quartic(1.0));
    const Vector x = ramp(n, -3.0, 3.0);
    const Vector g = ramp(n, 50.0, -50.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mirror_step(h, FeasibleSet::full_space(), x, g, 2.0));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_MirrorStepQuartic)->Arg(10)->Arg(100)->Arg(1000);

void BM_MirrorStepBurgOrthant(benchmark::State& state) {
    const Index n = state.range(0);
    const auto h = ReferenceFunction::uniform(n, Component::burg_log());
    const Vector x = ramp(n, 0.1, 2.0);
    const Vector g = ramp(n, -1.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mirror_step(h, FeasibleSet::positive_orthant(), x, g, 4.0));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_MirrorStepBurgOrthant)->Arg(10)->Arg(100)->Arg(1000);

void BM_MirrorStepBurgSimplex(benchmark::State& state) {
    const Index n = state.range(0);
    const auto h = ReferenceFunction::uniform(n, Component::burg_log());
    const Vector x = Vector::Constant(n, 1.0 / static_cast<double>(n));
    const Vector g = ramp(n, -5.0, 5.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mirror_step(h, FeasibleSet::simplex(), x, g, 4.0));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_MirrorStepBurgSimplex)->Arg(10)->Arg(100)->Arg(1000);

}  // namespace
