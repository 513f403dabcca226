// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "twinbeam/lg_mode.hpp"
#include "twinbeam/mc_oracle.hpp"
#include "twinbeam/sweep.hpp"

namespace {

using namespace twinbeam;

GridGeometry grid(const benchmark::State& state) {
  return {1480.0, static_cast<std::size_t>(state.range(0))};
}

void BM_LgFieldSerial(benchmark::State& state) {
  const auto g = grid(state);
  for (auto _ : state) benchmark::DoNotOptimize(serial::lg_field({-2, 1}, g));
}

void BM_LgFieldParallel(benchmark::State& state) {
  const auto g = grid(state);
  for (auto _ : state) benchmark::DoNotOptimize(lg_field({-2, 1}, g));
}

void BM_InterferenceSerial(benchmark::State& state) {
  const auto g = grid(state);
  const auto f = lg_field({-1, 0}, g);
  const Tilt t = tilt_for_fringes(g, 12.0);
  for (auto _ : state) benchmark::DoNotOptimize(serial::interfere_plane_wave(f, t));
}

void BM_InterferenceParallel(benchmark::State& state) {
  const auto g = grid(state);
  const auto f = lg_field({-1, 0}, g);
  const Tilt t = tilt_for_fringes(g, 12.0);
  for (auto _ : state) benchmark::DoNotOptimize(interfere_plane_wave(f, t));
}

const TwinBeamScenario kMcScenario{LumpedChannelSpec{2.0, 0.9, 0.8, LossPlacement::loss_after_gain}, 1000.0, 0.0};

void BM_MonteCarloSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial::mc_nsf_oracle(kMcScenario, state.range(0), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarloParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mc_nsf_oracle(kMcScenario, state.range(0), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

SweepSettings window_sweep() {
  SweepSettings s;
  s.delta_min_mhz = -28.0;
  s.delta_max_mhz = -7.0;
  return s;
}

void BM_SweepSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial::sweep_detuning({}, {}, window_sweep()));
}

void BM_SweepParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sweep_detuning({}, {}, window_sweep()));
}

}  // namespace

BENCHMARK(BM_LgFieldSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LgFieldParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InterferenceSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InterferenceParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloSerial)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
