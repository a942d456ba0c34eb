#include <benchmark/benchmark.h>

#include <cmath>

#include "proxkit/figure.hpp"
#include "proxkit/grid.hpp"

using namespace proxkit;

namespace {

// Smooth convex objective with a little work per point.
double objective(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::log1p(std::exp(x[i] - 0.3 * static_cast<double>(i)));
  return s + 0.5 * x.squaredNorm();
}

template <bool Parallel>
void BM_grid_argmin(benchmark::State& state) {
  GridSpec grid;
  grid.lo = -2.0;
  grid.hi = 2.0;
  grid.steps = state.range(0);
  for (auto _ : state) {
    const GridArgmin r = Parallel ? grid_argmin(objective, 2, grid) : grid_argmin_serial(objective, 2, grid);
    benchmark::DoNotOptimize(r.value);
  }
  state.SetItemsProcessed(state.iterations() * grid.steps * grid.steps);
}

template <bool Parallel>
void BM_figure(benchmark::State& state) {
  const FigurePreset p = figure_preset("example1");
  const FigureGrid grid{-4.0, 4.0, static_cast<long>(state.range(0))};
  const std::vector<double> gammas{0.5, 2.0, 8.0};
  for (auto _ : state) {
    const FigureData d =
        Parallel ? figure_data(p.op, p.fn, gammas, grid) : figure_data_serial(p.op, p.fn, gammas, grid);
    benchmark::DoNotOptimize(d.points.data());
  }
  state.SetItemsProcessed(state.iterations() * grid.points * grid.points);
}

}  // namespace

BENCHMARK(BM_grid_argmin<false>)->Name("grid_argmin/serial")->Arg(201)->Arg(801)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_grid_argmin<true>)->Name("grid_argmin/openmp")->Arg(201)->Arg(801)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_figure<false>)->Name("figure/serial")->Arg(41)->Arg(101)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_figure<true>)->Name("figure/openmp")->Arg(41)->Arg(101)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
