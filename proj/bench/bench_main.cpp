#include <benchmark/benchmark.h>

#include "ponsim/config.hpp"
#include "ponsim/parallel.hpp"
#include "ponsim/rng.hpp"
#include "ponsim/traffic.hpp"

using namespace ponsim;

namespace {

ScenarioConfig desk() {
  ScenarioConfig c = default_config();
  c.n_onus = 8;
  c.line_rate_bps = 2'500'000'000ull;
  c.traffic.fl_spec.payload_bytes_per_round = 2'640'000;
  c.duration = 4s;
  c.warmup = 1s;
  return c;
}

void BM_ReplicationsSerial(benchmark::State& state) {
  const auto cfg = desk();
  for (auto _ : state) {
    auto r = run_replications_serial(cfg, 0.8, static_cast<std::uint32_t>(state.range(0)), 1);
    benchmark::DoNotOptimize(r);
  }
}

void BM_ReplicationsParallel(benchmark::State& state) {
  const auto cfg = desk();
  for (auto _ : state) {
    auto r = run_replications_parallel(cfg, 0.8, static_cast<std::uint32_t>(state.range(0)), 1);
    benchmark::DoNotOptimize(r);
  }
}

std::vector<double> series() {
  RngStream rng("bench/pareto", derive_stream_key(1, "bench/pareto"));
  ParetoOnOffSpec spec;
  spec.target_rate_bps = 1e9;
  const auto frames = pareto_onoff_arrivals(spec, rng, 20s);
  return bin_arrivals(frames, 100us, 20s);
}

void BM_HurstSerial(benchmark::State& state) {
  const auto s = series();
  for (auto _ : state) benchmark::DoNotOptimize(variance_time_hurst_serial(s));
}

void BM_HurstParallel(benchmark::State& state) {
  const auto s = series();
  for (auto _ : state) benchmark::DoNotOptimize(variance_time_hurst_parallel(s));
}

}  // namespace

BENCHMARK(BM_ReplicationsSerial)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ReplicationsParallel)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HurstSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HurstParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
