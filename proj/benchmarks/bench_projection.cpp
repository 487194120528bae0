#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "geoshadow/projection.hpp"
#include "geoshadow/shadowcast.hpp"
#include "geoshadow/solar.hpp"

using namespace geoshadow;

namespace {

// Grid-aligned, slightly oblique camera: sample ~ col + 0.2 h, line ~ row.
RpcModel oblique_rpc() {
  RpcModel m;
  m.samp_num[1] = 1.0;
  m.samp_num[3] = 0.2;
  m.line_num[2] = 1.0;
  m.samp_den[0] = 1.0;
  m.line_den[0] = 1.0;
  return m;
}

}  // namespace

static void BM_ProjectShadows(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Raster dsm = bench::city_dsm(n, n);
  dsm = Raster(n, n, std::vector<double>(dsm.samples().begin(), dsm.samples().end()),
               GeoTransform{0.0, 0.0, 1.0, 1.0}, dsm.nodata(), Crs::geographic());
  const Raster shadow = cast_shadows_oracle(dsm, sun_direction(135.0, 30.0));
  ProjectOptions options;
  options.threads = static_cast<int>(state.range(1));
  const RpcModel rpc = oblique_rpc();
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_shadows(dsm, shadow, rpc, n, n + 20, options));
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_ProjectShadows)->Args({256, 1})->Args({512, 1})->Args({512, 4})->UseRealTime()->Unit(benchmark::kMillisecond);
