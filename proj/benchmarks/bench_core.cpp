#include <array>

#include <benchmark/benchmark.h>

#include "ghzclock/allan.hpp"
#include "ghzclock/clock.hpp"
#include "ghzclock/sensitivity.hpp"

using namespace ghzclock;

namespace {

void BM_KrausEvolution(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityState ghz = DensityState::from_pure(build_state(StateKind::ghz, n));
  const ChannelParams cp{{n, 0.7, 0.2}, 0.3, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(evolve_oracle(ghz, cp));
}
BENCHMARK(BM_KrausEvolution)->DenseRange(2, 8, 2)->Unit(benchmark::kMicrosecond);

void BM_QfiEigendecomposition(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityState rho = evolve_ghz_analytic({{n, 0.7, 0.2}, 0.3, 0.4});
  for (auto _ : state) benchmark::DoNotOptimize(qfi_numeric(rho));
}
BENCHMARK(BM_QfiEigendecomposition)->DenseRange(2, 8, 2)->Unit(benchmark::kMicrosecond);

void BM_HeraldedSweep(benchmark::State& state) {
  const std::array kinds{ProtocolKind::heralded_ghz};
  for (auto _ : state) benchmark::DoNotOptimize(sweep_vs_N(kinds, 4, 40, 1.0, 0.0, 1));
}
BENCHMARK(BM_HeraldedSweep)->Unit(benchmark::kMillisecond);

void BM_SssOptimum(benchmark::State& state) {
  const EnsembleParams p{static_cast<int>(state.range(0)), 1.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(optimize_sss(p, 0.05));
}
BENCHMARK(BM_SssOptimum)->Arg(50)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_ClockCycles(benchmark::State& state) {
  const ClockPreset preset = ca_plus_preset();
  ProtocolSpec spec;
  spec.kind = static_cast<ProtocolKind>(state.range(0));
  spec.params = {4, preset.gamma_decay, 0.0};
  const double T = 0.11;
  const EstimatorSpec est = default_estimator(spec, T);
  constexpr std::size_t kCycles = 10'000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_clock(spec, est, preset.lo, ServoConfig{}, T, kCycles, 42));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kCycles));
}
BENCHMARK(BM_ClockCycles)
    ->Arg(static_cast<int>(ProtocolKind::heralded_ghz))
    ->Arg(static_cast<int>(ProtocolKind::css))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
