#include "momo/dataset.hpp"

#include <cmath>

#include "momo/errors.hpp"

namespace momo {

std::vector<Sample> build_samples(const FeatureFrame& frame, const OptSeries& momentum,
                                  int window_len) {
  if (window_len < 1) throw ConfigError("build_samples: window_len must be >= 1");
  if (momentum.size() != frame.rows.size()) {
    throw DataError("build_samples: momentum length " + std::to_string(momentum.size()) +
                    " does not match frame length " + std::to_string(frame.rows.size()));
  }
  std::vector<Sample> samples;
  const std::size_t n = frame.rows.size();
  if (n < static_cast<std::size_t>(window_len) + 1) return samples;

  for (std::size_t t = static_cast<std::size_t>(window_len) - 1; t + 1 < n; ++t) {
    if (!momentum[t + 1]) continue;
    bool all_defined = true;
    for (std::size_t k = t + 1 - static_cast<std::size_t>(window_len); k <= t; ++k) {
      if (!frame.rows[k]) {
        all_defined = false;
        break;
      }
    }
    if (!all_defined) continue;

    Sample s;
    s.ticker = frame.ticker;
    s.end_index = static_cast<std::ptrdiff_t>(t);
    s.window_len = window_len;
    s.window.reserve(static_cast<std::size_t>(window_len) * kFeatureCount);
    for (std::size_t k = t + 1 - static_cast<std::size_t>(window_len); k <= t; ++k) {
      for (double v : frame.rows[k]->to_array()) s.window.push_back(v);
    }
    s.label = *momentum[t + 1];
    samples.push_back(std::move(s));
  }
  return samples;
}

Scaler fit_scaler(std::span<const Sample> train_samples) {
  if (train_samples.empty()) throw DataError("fit_scaler: empty training list");
  Scaler scaler;
  std::array<double, kFeatureCount> sum{};
  std::array<double, kFeatureCount> sum_sq{};
  std::size_t rows = 0;
  for (const Sample& s : train_samples) {
    for (int t = 0; t < s.window_len; ++t) {
      for (int f = 0; f < kFeatureCount; ++f) {
        const double v = s.cell(t, f);
        sum[static_cast<std::size_t>(f)] += v;
        sum_sq[static_cast<std::size_t>(f)] += v * v;
      }
    }
    rows += static_cast<std::size_t>(s.window_len);
  }
  const double n = static_cast<double>(rows);
  for (int f = 0; f < kFeatureCount; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    const double mean = sum[fi] / n;
    double var = sum_sq[fi] / n - mean * mean;
    if (var < 0.0) var = 0.0;  // guard against rounding
    scaler.mean[fi] = mean;
    if (var > 0.0) {
      scaler.scale[fi] = std::sqrt(var);
    } else {
      scaler.scale[fi] = 1.0;
      scaler.degenerate[fi] = true;
    }
  }
  return scaler;
}

void apply_scaler_in_place(Sample& sample, const Scaler& scaler) {
  for (int t = 0; t < sample.window_len; ++t) {
    for (int f = 0; f < kFeatureCount; ++f) {
      const auto idx =
          static_cast<std::size_t>(t) * kFeatureCount + static_cast<std::size_t>(f);
      const auto fi = static_cast<std::size_t>(f);
      sample.window[idx] = (sample.window[idx] - scaler.mean[fi]) / scaler.scale[fi];
    }
  }
}

Sample apply_scaler(const Sample& sample, const Scaler& scaler) {
  Sample out = sample;
  apply_scaler_in_place(out, scaler);
  return out;
}

double unscale_cell(double value, const Scaler& scaler, int feature) {
  const auto fi = static_cast<std::size_t>(feature);
  return value * scaler.scale[fi] + scaler.mean[fi];
}

WalkForwardSchedule make_walk_forward_schedule(std::size_t n_usable_days, std::size_t train_size,
                                               std::size_t horizon) {
  if (train_size < 1) throw ConfigError("walk-forward: train_size must be >= 1");
  if (horizon < 1) throw ConfigError("walk-forward: horizon must be >= 1");
  if (n_usable_days <= train_size) {
    throw DataError("walk-forward: need more than " + std::to_string(train_size) +
                    " usable days, got " + std::to_string(n_usable_days));
  }
  WalkForwardSchedule schedule;
  schedule.train_size = train_size;
  schedule.horizon = horizon;
  for (std::size_t start = train_size; start < n_usable_days; start += horizon) {
    Fold fold;
    fold.train_begin = start - train_size;
    fold.train_end = start;
    fold.predict_begin = start;
    fold.predict_end = std::min(start + horizon, n_usable_days);
    schedule.folds.push_back(fold);
  }
  return schedule;
}

}  // namespace momo
