#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "momo/features.hpp"

namespace momo {

inline constexpr int kDefaultWindowLen = 10;
inline constexpr std::size_t kDefaultTrainSize = 240;
inline constexpr std::size_t kDefaultHorizon = 10;

/// A feature window ending at trading-day index `end_index`, labelled with
/// the next day's return momentum.
struct Sample {
  std::string ticker;
  std::ptrdiff_t end_index = 0;
  int window_len = kDefaultWindowLen;
  /// window_len x 6 feature matrix, row-major, oldest day first.
  std::vector<double> window;
  double label = 0.0;

  double cell(int t, int f) const {
    return window[static_cast<std::size_t>(t) * kFeatureCount + static_cast<std::size_t>(f)];
  }
};

/// Per-feature location and scale fitted on training windows only.
/// Zero-variance columns keep scale 1 and are flagged degenerate.
struct Scaler {
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> scale{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  std::array<bool, kFeatureCount> degenerate{};
};

struct Dataset {
  std::vector<Sample> samples;
  Scaler scaler;
};

/// One sample per index t where rows t-window_len+1..t are all defined and
/// momentum[t+1] is defined. Empty output is allowed.
std::vector<Sample> build_samples(const FeatureFrame& frame, const OptSeries& momentum,
                                  int window_len = kDefaultWindowLen);

/// Per-column mean and population standard deviation over every window cell.
/// Throws DataError on an empty training list.
Scaler fit_scaler(std::span<const Sample> train_samples);

/// Map each window cell to (x - mean) / scale; the label is left raw.
Sample apply_scaler(const Sample& sample, const Scaler& scaler);
void apply_scaler_in_place(Sample& sample, const Scaler& scaler);

/// Inverse map for one cell value.
double unscale_cell(double value, const Scaler& scaler, int feature);

/// Half-open index intervals into a per-ticker ordered sample list.
struct Fold {
  std::size_t train_begin = 0;
  std::size_t train_end = 0;
  std::size_t predict_begin = 0;
  std::size_t predict_end = 0;
};

struct WalkForwardSchedule {
  std::size_t train_size = kDefaultTrainSize;
  std::size_t horizon = kDefaultHorizon;
  std::vector<Fold> folds;
};

/// Consecutive predict blocks of `horizon` days covering indices
/// train_size..n_usable_days-1 (final block may be shorter); each fold trains
/// on the train_size indices immediately preceding its block. Throws
/// DataError when n_usable_days <= train_size.
WalkForwardSchedule make_walk_forward_schedule(std::size_t n_usable_days,
                                               std::size_t train_size = kDefaultTrainSize,
                                               std::size_t horizon = kDefaultHorizon);

}  // namespace momo
