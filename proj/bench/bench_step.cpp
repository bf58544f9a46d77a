#include <benchmark/benchmark.h>

#include "twave/kernels.hpp"

namespace {

twave::SolverConfig config(long n) {
    twave::SolverConfig c;
    c.params = twave::ModelParams::rescaled(0.1);
    c.grid = twave::Grid(0.0125 * static_cast<double>(n), n);
    c.dt = twave::cfl_dt(c.grid.dx(), 0.1, 0.5);
    return c;
}

template <twave::StepStats (*Kernel)(const twave::FieldPair&, twave::FieldPair&, const twave::StepCoefficients&)>
void BM_Step(benchmark::State& state) {
    const auto cfg = config(state.range(0));
    auto f = twave::make_initial(twave::InitialKind::Dip, 1.0, 0.5, 2.0, cfg.grid);
    twave::FieldPair g(f.size(), f.base);
    const auto coeff = twave::step_coefficients(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Kernel(f, g, coeff));
        std::swap(f, g);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_TEMPLATE(BM_Step, twave::step_serial)->RangeMultiplier(4)->Range(1 << 12, 1 << 18);
BENCHMARK_TEMPLATE(BM_Step, twave::step_parallel)->RangeMultiplier(4)->Range(1 << 12, 1 << 18);

BENCHMARK_MAIN();
