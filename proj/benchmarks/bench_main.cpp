#include <benchmark/benchmark.h>

#include "thinspec/assembly.hpp"
#include "thinspec/cell.hpp"
#include "thinspec/finescale.hpp"

using namespace thinspec;

static void BM_CellAssembly(benchmark::State& state) {
  const auto p = builtin_problem("P_LOC");
  const Grid g = make_cell_grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_cell(p, 0.3, g));
}
BENCHMARK(BM_CellAssembly)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_PrincipalCell(benchmark::State& state) {
  const auto p = builtin_problem("P_LOC");
  const Grid g = make_cell_grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(principal_cell_eig(p, 0.3, g).mu);
}
BENCHMARK(BM_PrincipalCell)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_RodSpectrum(benchmark::State& state) {
  const auto p = builtin_problem("P_LOC");
  const double eps = 1.0 / static_cast<double>(state.range(0));
  const RodPencil rod = assemble_rod(p, eps, RodPolicy{16, 0});
  SpectrumOptions opt;
  opt.k = 2;
  opt.sigma = 0.9 * 68.2 / (eps * eps);
  for (auto _ : state) benchmark::DoNotOptimize(positive_spectrum(rod, opt).lambda);
  state.counters["dofs"] = rod.reduction.reduced_dim();
}
BENCHMARK(BM_RodSpectrum)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
