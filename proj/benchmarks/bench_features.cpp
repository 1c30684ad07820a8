#include <benchmark/benchmark.h>

#include "momo/features.hpp"
#include "momo/market_data.hpp"

namespace {

momo::Universe make_universe(int n_days) {
  momo::SyntheticSpec spec;
  spec.n_tickers = 1;
  spec.n_days = n_days;
  spec.seed = 42;
  return momo::generate_synthetic_universe(spec).universe;
}

void BM_BuildFeatureFrame(benchmark::State& state) {
  const momo::Universe u = make_universe(static_cast<int>(state.range(0)));
  const momo::PriceSeries& series = u.series.begin()->second;
  for (auto _ : state) {
    benchmark::DoNotOptimize(momo::build_feature_frame(series));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SyntheticGeneration(benchmark::State& state) {
  momo::SyntheticSpec spec;
  spec.n_tickers = 3;
  spec.n_days = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(momo::generate_synthetic_universe(spec));
  }
}

}  // namespace

BENCHMARK(BM_BuildFeatureFrame)->Arg(600)->Arg(5000);
BENCHMARK(BM_SyntheticGeneration)->Arg(600);
