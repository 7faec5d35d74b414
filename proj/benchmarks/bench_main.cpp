#include <benchmark/benchmark.h>

#include "wrpipe/heat.hpp"
#include "wrpipe/nnwr.hpp"
#include "wrpipe/schedule.hpp"
#include "wrpipe/waveform.hpp"

using namespace wrpipe;

namespace {

void BM_TriFactorSolve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const TriFactor f(n, 0.5, kDD);
    std::vector<double> rhs(f.unknowns(), 1.0);
    for (auto _ : state) {
        f.solve(rhs);
        benchmark::DoNotOptimize(rhs.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_TriFactorSolve)->Arg(64)->Arg(512)->Arg(4096);

void BM_DirichletSweep(benchmark::State& state) {
    const auto p = DecomposedProblem::make(HeatProblem::reference(), 2000, 1024, 4, 16);
    const auto sd = nnwr::make_subdomain(p, 1, FluxStencil::Consistent);
    const std::vector<double> w(p.decomposition.block_len, 0.0);
    for (auto _ : state) {
        auto u = initial_state(sd.geom, p.problem.initial);
        auto f = nnwr::dirichlet_sweep(sd, u, w, w, 0);
        benchmark::DoNotOptimize(f.left.data());
    }
}
BENCHMARK(BM_DirichletSweep);

void BM_ClassicalNnwr(benchmark::State& state) {
    const auto p = DecomposedProblem::make(HeatProblem::reference(), 400, 256, static_cast<std::size_t>(state.range(0)));
    nnwr::Config c;
    c.iterates = 4;
    c.tol = 0.0;
    for (auto _ : state) {
        auto r = nnwr::run_classical(p, c);
        benchmark::DoNotOptimize(r.final_traces.values.data());
    }
}
BENCHMARK(BM_ClassicalNnwr)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SimulatePipeline(benchmark::State& state) {
    const auto dag = schedule::build_dag(schedule::Method::Nnwr, 8, 4, static_cast<int>(state.range(0)));
    const auto plan = schedule::canonical_pipeline(dag);
    for (auto _ : state) {
        auto r = schedule::simulate(dag, plan);
        benchmark::DoNotOptimize(r.makespan);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dag.size()));
}
BENCHMARK(BM_SimulatePipeline)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
