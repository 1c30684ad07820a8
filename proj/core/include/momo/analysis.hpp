#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "momo/backtest.hpp"
#include "momo/calendar.hpp"
#include "momo/market_data.hpp"
#include "momo/predictor.hpp"

namespace momo {

inline constexpr int kDefaultGroupLen = 84;       // ~four months of trading days
inline constexpr int kMinFinalGroupLen = 20;      // shorter tail blocks are dropped
inline constexpr double kDefaultCorrThreshold = 0.7;

/// Standard Pearson product-moment coefficient; empty when either side has
/// zero variance. Throws DataError on mismatched or too-short input.
std::optional<double> pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation with average ranks on ties; empty when either
/// side is constant.
std::optional<double> spearman_rank_correlation(std::span<const double> x,
                                                std::span<const double> y);

/// One ticker's aligned prediction/label series over the test span.
struct PredLabelSeries {
  std::vector<Date> dates;
  std::vector<double> predictions;
  std::vector<double> labels;
};

struct GroupStats {
  std::string ticker;
  int group_index = 0;
  Date start;
  Date end;
  int n_days = 0;
  std::optional<double> correlation;  // empty (flagged) when either side is constant
  double label_std = 0.0;             // population standard deviation
};

/// Consecutive disjoint blocks of group_len trading days per ticker; the
/// final short block is kept when it spans at least kMinFinalGroupLen days.
std::vector<GroupStats> group_correlations(const std::map<std::string, PredLabelSeries>& series,
                                           int group_len = kDefaultGroupLen);

/// Tickers whose defined correlation strictly exceeds the threshold, per
/// group index.
std::map<int, std::set<std::string>> select_high_correlation(
    std::span<const GroupStats> stats, double threshold = kDefaultCorrThreshold);

/// Keep only predictions of tickers that are selected within the group whose
/// period covers the prediction date; every date key survives so all-cash
/// days stay in the simulation.
Panel restrict_predictions(const Panel& predictions, std::span<const GroupStats> stats,
                           const std::map<int, std::set<std::string>>& selection);

struct DispersionTable {
  std::vector<std::pair<double, double>> points;  // (label_std, correlation)
  std::optional<double> rank_correlation;         // empty when ranks are degenerate
};

/// (label_std, correlation) per defined-correlation group plus their Spearman
/// rank correlation. Throws DataError with fewer than two usable groups.
DispersionTable dispersion_correlation_table(std::span<const GroupStats> stats);

struct HorizonDecayConfig {
  std::size_t train_size = kDefaultTrainSize;
  int horizon_days = 40;
  int split = 20;  // pooled correlation over days [0, split) vs [split, horizon)
  int window_len = kDefaultWindowLen;
  TrainConfig train;
  /// Baselines skip training; the zero predictor yields flagged-undefined
  /// correlations on both halves.
  PredictorKind kind = PredictorKind::lstm;
};

struct HorizonDecayResult {
  std::optional<double> corr_first;  // pooled over the first `split` predicted days
  std::optional<double> corr_last;   // pooled over the remaining days
  int n_first = 0;
  int n_last = 0;
};

/// Train one model per ticker, predict `horizon_days` consecutive days
/// without retraining, and compare pooled correlations of the two halves.
/// Throws DataError when any ticker lacks train_size + horizon_days usable
/// samples.
HorizonDecayResult horizon_decay_experiment(const Universe& universe,
                                            const HorizonDecayConfig& config);

}  // namespace momo
