#include <benchmark/benchmark.h>

#include "momo/predictor.hpp"
#include "momo/rng.hpp"

namespace {

momo::LstmParams make_params(int hidden) {
  momo::LstmParams p = momo::LstmParams::zeros(momo::kFeatureCount, hidden);
  momo::SplitMix64 stream(1);
  for (auto& [name, span] : momo::named_param_spans(p)) {
    for (double& v : span) v = stream.next_uniform(-0.08, 0.08);
  }
  return p;
}

std::vector<momo::Sample> make_batch(int n) {
  momo::SplitMix64 stream(2);
  std::vector<momo::Sample> batch;
  for (int k = 0; k < n; ++k) {
    momo::Sample s;
    s.window_len = momo::kDefaultWindowLen;
    for (int i = 0; i < s.window_len * momo::kFeatureCount; ++i) {
      s.window.push_back(stream.next_uniform(-1.0, 1.0));
    }
    s.label = stream.next_uniform(-0.02, 0.02);
    batch.push_back(std::move(s));
  }
  return batch;
}

void BM_LstmForward(benchmark::State& state) {
  const momo::LstmParams p = make_params(static_cast<int>(state.range(0)));
  const auto batch = make_batch(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        momo::lstm_forward(p, batch[0].window, batch[0].window_len));
  }
}

void BM_LstmGradFullBatch(benchmark::State& state) {
  const momo::LstmParams p = make_params(32);
  const auto batch = make_batch(static_cast<int>(state.range(0)));
  momo::LstmGrads grads;
  for (auto _ : state) {
    benchmark::DoNotOptimize(momo::lstm_grad_and_loss(p, batch, grads));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrainEpochs(benchmark::State& state) {
  momo::Dataset ds;
  ds.samples = make_batch(240);
  momo::TrainConfig config;
  config.epochs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(momo::train(ds, config));
  }
}

}  // namespace

BENCHMARK(BM_LstmForward)->Arg(8)->Arg(32);
BENCHMARK(BM_LstmGradFullBatch)->Arg(64)->Arg(240);
BENCHMARK(BM_TrainEpochs)->Arg(10)->Unit(benchmark::kMillisecond);
