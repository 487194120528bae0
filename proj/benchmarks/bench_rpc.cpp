#include <benchmark/benchmark.h>

#include <random>

#include "geoshadow/rpc.hpp"

using namespace geoshadow;

namespace {

RpcModel mild_rpc() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> small(-1e-3, 1e-3);
  RpcModel m;
  for (int i = 0; i < 20; ++i) {
    m.samp_num[i] = small(rng);
    m.line_num[i] = small(rng);
    m.samp_den[i] = small(rng);
    m.line_den[i] = small(rng);
  }
  m.samp_num[1] = 1.0;
  m.line_num[2] = -1.0;
  m.samp_den[0] = 1.0;
  m.line_den[0] = 1.0;
  m.lon_off = 2.35;
  m.lat_off = 48.85;
  m.lon_scale = m.lat_scale = 0.05;
  m.height_off = 100.0;
  m.height_scale = 500.0;
  m.samp_off = m.line_off = 10000.0;
  m.samp_scale = m.line_scale = 10000.0;
  return m;
}

}  // namespace

static void BM_EvalRational(benchmark::State& state) {
  const RpcModel m = mild_rpc();
  double lon = 2.34;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_rational(m, lon, 48.86, 120.0));
    lon += 1e-9;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EvalRational);

static void BM_Localize(benchmark::State& state) {
  const RpcModel m = mild_rpc();
  double sample = 9000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(localize(m, sample, 11000.0, 120.0));
    sample += 1e-3;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Localize);
