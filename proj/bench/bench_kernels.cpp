#include <benchmark/benchmark.h>

#include <cmath>

#include "homog/field.hpp"
#include "homog/grid.hpp"
#include "homog/kernels_reference.hpp"
#include "homog/krylov.hpp"

namespace {

using namespace homog;

FieldLaw bench_law()
{
    return FieldLaw::lognormal(0.0, CovarianceSpec{CovarianceKind::exponential, 1.0, 4.0});
}

EdgeCoefficientField bench_field(int dim, std::size_t n)
{
    return sample_edge_coefficients(PeriodicGrid::with_spacing(dim, n, 1.0), bench_law(), 7);
}

CellField bench_vector(const PeriodicGrid& g)
{
    CellField v(g);
    for (std::size_t i = 0; i < g.size(); ++i) v.values[i] = std::sin(0.37 * static_cast<double>(i));
    return v;
}

void BM_apply_A_openmp(benchmark::State& state)
{
    const auto a = bench_field(2, static_cast<std::size_t>(state.range(0)));
    const auto v = bench_vector(a.grid);
    for (auto _ : state) benchmark::DoNotOptimize(apply_A(a, v));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(a.grid.size()));
}

void BM_apply_A_reference(benchmark::State& state)
{
    const auto a = bench_field(2, static_cast<std::size_t>(state.range(0)));
    const auto v = bench_vector(a.grid);
    for (auto _ : state) benchmark::DoNotOptimize(reference::apply_A(a, v));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(a.grid.size()));
}

void BM_energy_openmp(benchmark::State& state)
{
    const auto a = bench_field(2, static_cast<std::size_t>(state.range(0)));
    const auto g = gradient(bench_vector(a.grid));
    const Direction xi = Direction::axis(2, 0);
    for (auto _ : state) benchmark::DoNotOptimize(face_energy_average(a, g, xi));
}

void BM_energy_reference(benchmark::State& state)
{
    const auto a = bench_field(2, static_cast<std::size_t>(state.range(0)));
    const auto g = reference::gradient(bench_vector(a.grid));
    const Direction xi = Direction::axis(2, 0);
    for (auto _ : state) benchmark::DoNotOptimize(reference::face_energy_average(a, g, xi));
}

void BM_cg_2d(benchmark::State& state)
{
    const auto a = bench_field(2, static_cast<std::size_t>(state.range(0)));
    const auto f0 = assemble_f0(a, Direction::axis(2, 0));
    SolverConfig cfg;
    cfg.preconditioner = state.range(1) ? Preconditioner::fourier : Preconditioner::none;
    for (auto _ : state) benchmark::DoNotOptimize(cg_meanzero(a, f0, cfg));
}

void BM_direct_1d(benchmark::State& state)
{
    const auto a = bench_field(1, static_cast<std::size_t>(state.range(0)));
    const auto f0 = assemble_f0(a, Direction::axis(1, 0));
    for (auto _ : state) benchmark::DoNotOptimize(direct_meanzero(a, f0));
}

} // namespace

BENCHMARK(BM_apply_A_openmp)->Arg(128)->Arg(512);
BENCHMARK(BM_apply_A_reference)->Arg(128)->Arg(512);
BENCHMARK(BM_energy_openmp)->Arg(128)->Arg(512);
BENCHMARK(BM_energy_reference)->Arg(128)->Arg(512);
BENCHMARK(BM_cg_2d)->Args({128, 0})->Args({128, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_direct_1d)->Arg(16384)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
