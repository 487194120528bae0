#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "geoshadow/shadowcast.hpp"
#include "geoshadow/solar.hpp"

using namespace geoshadow;

static void BM_CastShadows(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Raster dsm = bench::city_dsm(n, n);
  const SunGeometry sun = sun_direction(135.0, 30.0);
  CastOptions options;
  options.upscale = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cast_shadows(dsm, sun, options));
  }
  state.SetItemsProcessed(state.iterations() * n * n * options.upscale * options.upscale);
}
BENCHMARK(BM_CastShadows)->Args({256, 1})->Args({256, 4})->Args({1024, 1})->Unit(benchmark::kMillisecond);

static void BM_PathLayoutWalk(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PathLayout layout(n, n, sun_direction(20.0, 40.0));
  for (auto _ : state) {
    long sum = 0;
    for (std::size_t i = 0; i < layout.size(); ++i) {
      layout.walk(i, [&](const PathStep& s) { sum += s.col; });
    }
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_PathLayoutWalk)->Arg(512)->Arg(2048);
