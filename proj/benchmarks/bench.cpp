#include <benchmark/benchmark.h>

#include "kzchain/bdg.hpp"
#include "kzchain/mode_solver.hpp"
#include "kzchain/tebd.hpp"

namespace {

void BM_ModeSpectrum(benchmark::State& state) {
  const auto schedule = kz::Schedule::linear(1.0);
  const int L = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kz::kink_density_modes(schedule, 1.0, 20.0, L));
  }
}
BENCHMARK(BM_ModeSpectrum)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_BdgEvolve(benchmark::State& state) {
  const auto schedule = kz::Schedule::linear(1.0);
  const int L = static_cast<int>(state.range(0));
  const auto chain = kz::ChainSpec::uniform(L, -1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kz::evolve_bdg(chain, schedule, 10.0));
  }
}
BENCHMARK(BM_BdgEvolve)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TebdSlice(benchmark::State& state) {
  const auto schedule = kz::Schedule::linear(1.0);
  const int L = static_cast<int>(state.range(0));
  const auto chain = kz::ChainSpec::uniform(L, -1.0);
  const auto mapping = kz::map_periodic_to_linear(L);
  kz::TebdConfig cfg;
  cfg.D = 16;
  auto mps = kz::MpsState::plus_product(L);
  for (auto _ : state) {
    kz::trotter_slice(mps, chain, schedule, 0.4, cfg, mapping);
  }
}
BENCHMARK(BM_TebdSlice)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
