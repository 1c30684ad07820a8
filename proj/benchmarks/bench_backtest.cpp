#include <benchmark/benchmark.h>

#include "momo/backtest.hpp"
#include "momo/rng.hpp"

namespace {

struct Panels {
  momo::Panel predictions;
  momo::Panel realized;
};

Panels make_panels(int n_days, int n_tickers) {
  Panels panels;
  momo::SplitMix64 stream(3);
  momo::Date d = momo::Date::from_ymd(2018, 1, 2);
  for (int i = 0; i < n_days; ++i) {
    for (int k = 0; k < n_tickers; ++k) {
      const std::string ticker = "T" + std::to_string(k);
      panels.predictions[d][ticker] = stream.next_uniform(-0.02, 0.02);
      panels.realized[d][ticker] = stream.next_uniform(-0.03, 0.03);
    }
    d = d.next_weekday();
  }
  return panels;
}

void BM_RunBacktest(benchmark::State& state) {
  const Panels panels = make_panels(static_cast<int>(state.range(0)), 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(momo::run_backtest(panels.predictions, panels.realized,
                                                momo::FilterConfig{}, 1'000'000.0, 0.0001));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_RunBacktest)->Arg(252)->Arg(1260);

BENCHMARK_MAIN();
