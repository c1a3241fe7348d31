#include <benchmark/benchmark.h>

#include <cmath>

#include "anideg/stepper.hpp"

using namespace anideg;

namespace {

SimState quench_state(int n, int dim) {
    std::vector<int> extents(dim, n);
    std::vector<double> lo(dim, 0.0), hi(dim, 10.0);
    auto grid = std::make_shared<TorusGrid>(extents, lo, hi);
    auto aniso = std::make_shared<AnisotropySpec>(AnisotropySpec::isotropic(dim));
    aniso->certify(2000, 5);
    auto reg = std::make_shared<RegularizedMaterial>(MaterialSpec::log_quench(1.0, 2.0), 0.1);
    Field phi(grid);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double x = grid->coord(0, static_cast<int>(i) % n);
        phi[i] = 0.5 * std::sin(2.0 * M_PI * x / 10.0);
    }
    return make_state(std::move(phi), reg, aniso);
}

} // namespace

static void BM_StepExplicit1D(benchmark::State& state) {
    SimState s = quench_state(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(step_explicit(s, 1e-9));
}
BENCHMARK(BM_StepExplicit1D)->Arg(128)->Arg(512);

static void BM_StepIMEX1D(benchmark::State& state) {
    SimState s = quench_state(static_cast<int>(state.range(0)), 1);
    SpectralSolver solver(s.phi.grid_ptr());
    for (auto _ : state) benchmark::DoNotOptimize(step_imex(s, 1e-6, 1.0, solver));
}
BENCHMARK(BM_StepIMEX1D)->Arg(128)->Arg(512);

static void BM_StepIMEX2D(benchmark::State& state) {
    SimState s = quench_state(static_cast<int>(state.range(0)), 2);
    SpectralSolver solver(s.phi.grid_ptr());
    for (auto _ : state) benchmark::DoNotOptimize(step_imex(s, 1e-6, 1.0, solver));
}
BENCHMARK(BM_StepIMEX2D)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
