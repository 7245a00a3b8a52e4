// Serial reference vs OpenMP per-trial kernel for the martingale Monte Carlo.

#include <benchmark/benchmark.h>

#include "ssle/martingale.hpp"

using namespace ssle;

namespace {

MCConfig config(int trials) {
  MCConfig cfg;
  cfg.trials = trials;
  cfg.steps = 100;
  cfg.twice_level = 4;
  cfg.base_seed = 17;
  return cfg;
}

void BM_SerialN1(benchmark::State& st) {
  ModelSpec m = build_model_n1(Rational(3));
  MCConfig cfg = config(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(mc_trial_deltas_serial(m, cfg));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_ParallelN1(benchmark::State& st) {
  ModelSpec m = build_model_n1(Rational(3));
  MCConfig cfg = config(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(mc_trial_deltas_parallel(m, cfg));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SerialVirasoro(benchmark::State& st) {
  ModelSpec m = build_model_virasoro(Rational(2));
  MCConfig cfg = config(static_cast<int>(st.range(0)));
  cfg.twice_level = 6;
  for (auto _ : st) benchmark::DoNotOptimize(mc_trial_deltas_serial(m, cfg));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_ParallelVirasoro(benchmark::State& st) {
  ModelSpec m = build_model_virasoro(Rational(2));
  MCConfig cfg = config(static_cast<int>(st.range(0)));
  cfg.twice_level = 6;
  for (auto _ : st) benchmark::DoNotOptimize(mc_trial_deltas_parallel(m, cfg));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_SerialN1)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelN1)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SerialVirasoro)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelVirasoro)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
