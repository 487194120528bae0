#include <benchmark/benchmark.h>

#include <random>

#include "geoshadow/masks.hpp"

using namespace geoshadow;

namespace {

Raster speckle(int n, double density) {
  std::mt19937 rng(5);
  std::bernoulli_distribution on(density);
  std::vector<double> v(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (double& x : v) x = on(rng) ? 1.0 : 0.0;
  return Raster(n, n, std::move(v));
}

}  // namespace

static void BM_RemoveSmallRegions(benchmark::State& state) {
  const Raster mask = speckle(static_cast<int>(state.range(0)), 0.45);
  for (auto _ : state) benchmark::DoNotOptimize(remove_small_regions(mask, 20));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(mask.size()));
}
BENCHMARK(BM_RemoveSmallRegions)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

static void BM_FillSmallHoles(benchmark::State& state) {
  const Raster mask = speckle(static_cast<int>(state.range(0)), 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(fill_small_holes(mask, 20));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(mask.size()));
}
BENCHMARK(BM_FillSmallHoles)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

static void BM_Dilate(benchmark::State& state) {
  const Raster mask = speckle(512, 0.02);
  const int radius = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dilate(mask, radius));
}
BENCHMARK(BM_Dilate)->Arg(1)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);
