#include <benchmark/benchmark.h>

#include <random>

#include "anideg/grid.hpp"
#include "anideg/spectral.hpp"

using namespace anideg;

namespace {

Field random_field(const GridPtr& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
    return f;
}

GridPtr grid_2d(int n) {
    return std::make_shared<TorusGrid>(std::vector<int>{n, n}, std::vector<double>{0.0, 0.0},
                                       std::vector<double>{1.0, 1.0});
}

} // namespace

static void BM_LapH(benchmark::State& state) {
    const auto g = grid_2d(static_cast<int>(state.range(0)));
    const Field f = random_field(g, 1);
    for (auto _ : state) benchmark::DoNotOptimize(lap_h(f));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g->size()));
}
BENCHMARK(BM_LapH)->Arg(64)->Arg(256);

static void BM_GradDiv(benchmark::State& state) {
    const auto g = grid_2d(static_cast<int>(state.range(0)));
    const Field f = random_field(g, 2);
    for (auto _ : state) benchmark::DoNotOptimize(div_h(grad_h(f)));
}
BENCHMARK(BM_GradDiv)->Arg(64)->Arg(256);

static void BM_HessianFrobenius(benchmark::State& state) {
    const auto g = grid_2d(static_cast<int>(state.range(0)));
    const Field f = random_field(g, 3);
    for (auto _ : state) benchmark::DoNotOptimize(hessian_frobenius_sq(f));
}
BENCHMARK(BM_HessianFrobenius)->Arg(64)->Arg(256);

static void BM_SpectralSolve(benchmark::State& state) {
    const auto g = grid_2d(static_cast<int>(state.range(0)));
    SpectralSolver solver(g);
    const Field f = random_field(g, 4);
    const double kappa = 1.0, dt = 1e-6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.solve(
            [&](std::span<const int> k) {
                const double lam = solver.lap_symbol(k);
                return 1.0 + dt * kappa * lam * lam;
            },
            f));
    }
}
BENCHMARK(BM_SpectralSolve)->Arg(64)->Arg(256);
