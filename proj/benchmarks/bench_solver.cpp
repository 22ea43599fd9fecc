#include <benchmark/benchmark.h>

#include "bqc/spectral.hpp"

using namespace bqc;

namespace {

SolverState prepared_state(int kmax, int nv) {
    SimConfig cfg;
    cfg.kmax = kmax;
    cfg.nv = nv;
    cfg.epsilon = 0.01;
    MultiplierParams mp;
    return init_perturbation(cfg, mp);
}

} // namespace

static void BM_rhs(benchmark::State& state) {
    const int kmax = int(state.range(0)) / 2 - 1;
    const int nv = int(state.range(0));
    SimConfig cfg;
    cfg.kmax = kmax;
    cfg.nv = nv;
    cfg.epsilon = 0.01;
    SolverState st = prepared_state(kmax, nv);
    FftWorkspace ws(st.omega.grid);
    RhsResult out;
    for (auto _ : state) {
        rhs_into(st, cfg, ws, true, out);
        benchmark::DoNotOptimize(out.flux);
    }
}
BENCHMARK(BM_rhs)->Arg(64)->Arg(128)->Arg(256);

static void BM_step_rk4(benchmark::State& state) {
    const int kmax = int(state.range(0)) / 2 - 1;
    const int nv = int(state.range(0));
    SimConfig cfg;
    cfg.kmax = kmax;
    cfg.nv = nv;
    cfg.epsilon = 0.01;
    cfg.dt = 0.01;
    SolverState st = prepared_state(kmax, nv);
    FftWorkspace ws(st.omega.grid);
    for (auto _ : state) {
        step_rk4(st, cfg.dt, cfg, ws, true);
        benchmark::DoNotOptimize(st.omega.a[1]);
    }
}
BENCHMARK(BM_step_rk4)->Arg(64)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
