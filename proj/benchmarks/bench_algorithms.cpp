#include <benchmark/benchmark.h>

#include "relsmooth/algorithms.hpp"

using namespace relsmooth;

namespace {

void BM_RelGDQuadQuartic(benchmark::State& state) {
    const Index n = state.range(0);
    const Problem p = build_problem(quad_quartic_instance(n, 0));
    const Vector x0 = normal_start(n, 1000.0, 0);
    RunOptions o;
    o.stride = 10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(relgd(p, x0, p.cert.L, 10, o));
    }
    state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_RelGDQuadQuartic)->Arg(100)->Arg(400);

void BM_RelRCDEpoch(benchmark::State& state) {
    const Index n = state.range(0);
    const Problem p = build_problem(quad_quartic_instance(n, 0));
    const Vector x0 = normal_start(n, 1000.0, 0);
    const EsoCertificate cert = make_eso(p, Sampling::single_uniform(n));
    RunOptions o;
    o.stride = static_cast<int>(n);
    Rng rng = make_stream(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(relrcd(p, x0, cert, n, rng, o));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_RelRCDEpoch)->Arg(100)->Arg(400);

void BM_RelSGDPoissonEpoch(benchmark::State& state) {
    const Index m = state.range(0);
    const Problem p = build_problem(poisson_instance(m, 10, 0));
    const Vector x0 = Vector::Ones(10);
    const StepsizeSchedule sch = StepsizeSchedule::sqrt_growth(p.cert.L / 10.0);
    RunOptions o;
    o.stride = static_cast<int>(m);
    Rng rng = make_stream(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(relsgd(p, x0, sch, 1, m, rng, o));
    }
    state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_RelSGDPoissonEpoch)->Arg(1000);

}  // namespace
