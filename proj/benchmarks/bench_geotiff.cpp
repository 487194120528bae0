#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "geoshadow/geotiff.hpp"

using namespace geoshadow;

static void BM_EncodeGeoTiff(benchmark::State& state) {
  const Raster dsm = bench::city_dsm(1024, 1024);
  GeoTiffWriteOptions options;
  options.compression = state.range(0) ? TiffCompression::Deflate : TiffCompression::None;
  for (auto _ : state) benchmark::DoNotOptimize(encode_geotiff(dsm, options));
}
BENCHMARK(BM_EncodeGeoTiff)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_DecodeGeoTiff(benchmark::State& state) {
  const Raster dsm = bench::city_dsm(1024, 1024);
  GeoTiffWriteOptions options;
  options.compression = state.range(0) ? TiffCompression::Deflate : TiffCompression::None;
  const std::vector<std::uint8_t> bytes = encode_geotiff(dsm, options);
  for (auto _ : state) benchmark::DoNotOptimize(decode_geotiff(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<long>(bytes.size()));
}
BENCHMARK(BM_DecodeGeoTiff)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
