#include "momo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "momo/errors.hpp"

namespace momo {
namespace {

bool is_constant(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] != v[0]) return false;
  }
  return true;
}

double population_std(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / n);
}

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<double> pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson_correlation: length mismatch");
  if (x.size() < 2) throw DataError("pearson_correlation: need at least 2 points");
  if (is_constant(x) || is_constant(y)) return std::nullopt;

  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::optional<double> spearman_rank_correlation(std::span<const double> x,
                                                std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("spearman_rank_correlation: length mismatch");
  if (x.size() < 2) throw DataError("spearman_rank_correlation: need at least 2 points");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson_correlation(rx, ry);
}

std::vector<GroupStats> group_correlations(const std::map<std::string, PredLabelSeries>& series,
                                           int group_len) {
  if (group_len < 2) throw ConfigError("group_correlations: group_len must be >= 2");
  std::vector<GroupStats> stats;
  for (const auto& [ticker, s] : series) {
    const std::size_t n = s.dates.size();
    if (s.predictions.size() != n || s.labels.size() != n) {
      throw DataError("group_correlations: misaligned series for " + ticker);
    }
    int group_index = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(group_len)) {
      const std::size_t len = std::min(static_cast<std::size_t>(group_len), n - start);
      const bool final_block = start + len == n && len < static_cast<std::size_t>(group_len);
      if (final_block && len < static_cast<std::size_t>(kMinFinalGroupLen)) break;

      GroupStats g;
      g.ticker = ticker;
      g.group_index = group_index++;
      g.start = s.dates[start];
      g.end = s.dates[start + len - 1];
      g.n_days = static_cast<int>(len);
      const std::span<const double> preds(s.predictions.data() + start, len);
      const std::span<const double> labels(s.labels.data() + start, len);
      g.correlation = pearson_correlation(preds, labels);
      g.label_std = population_std(labels);
      stats.push_back(std::move(g));
    }
  }
  return stats;
}

std::map<int, std::set<std::string>> select_high_correlation(std::span<const GroupStats> stats,
                                                             double threshold) {
  std::map<int, std::set<std::string>> selection;
  for (const GroupStats& g : stats) {
    selection[g.group_index];  // every group appears, possibly empty
    if (g.correlation && *g.correlation > threshold) {
      selection[g.group_index].insert(g.ticker);
    }
  }
  return selection;
}

Panel restrict_predictions(const Panel& predictions, std::span<const GroupStats> stats,
                           const std::map<int, std::set<std::string>>& selection) {
  Panel restricted;
  for (const auto& [date, scores] : predictions) restricted[date];
  for (const GroupStats& g : stats) {
    const auto sel_it = selection.find(g.group_index);
    if (sel_it == selection.end() || sel_it->second.find(g.ticker) == sel_it->second.end()) {
      continue;
    }
    for (auto it = predictions.lower_bound(g.start);
         it != predictions.end() && it->first <= g.end; ++it) {
      const auto score_it = it->second.find(g.ticker);
      if (score_it != it->second.end()) restricted[it->first][g.ticker] = score_it->second;
    }
  }
  return restricted;
}

DispersionTable dispersion_correlation_table(std::span<const GroupStats> stats) {
  DispersionTable table;
  for (const GroupStats& g : stats) {
    if (g.correlation) table.points.emplace_back(g.label_std, *g.correlation);
  }
  if (table.points.size() < 2) {
    throw DataError("dispersion_correlation_table: need at least 2 groups with defined correlation");
  }
  std::vector<double> stds;
  std::vector<double> corrs;
  stds.reserve(table.points.size());
  corrs.reserve(table.points.size());
  for (const auto& [s, c] : table.points) {
    stds.push_back(s);
    corrs.push_back(c);
  }
  table.rank_correlation = spearman_rank_correlation(stds, corrs);
  return table;
}

HorizonDecayResult horizon_decay_experiment(const Universe& universe,
                                            const HorizonDecayConfig& config) {
  if (config.horizon_days < 2 || config.split < 1 || config.split >= config.horizon_days) {
    throw ConfigError("horizon_decay: need 1 <= split < horizon_days");
  }
  const std::size_t needed = config.train_size + static_cast<std::size_t>(config.horizon_days);

  std::vector<double> first_preds, first_labels, last_preds, last_labels;
  for (const auto& [ticker, series] : universe.series) {
    const FeatureFrame frame = build_feature_frame(series, universe.calendar);
    const OptSeries closes = aligned_closes(series, universe.calendar);
    const OptSeries returns = returns_from_closes(closes);
    const OptSeries momentum = compute_return_momentum(returns);
    std::vector<Sample> samples = build_samples(frame, momentum, config.window_len);
    if (samples.size() < needed) {
      throw DataError("horizon_decay: ticker " + ticker + " has " +
                      std::to_string(samples.size()) + " usable days, needs " +
                      std::to_string(needed));
    }

    Dataset dataset;
    dataset.samples.assign(samples.begin(),
                           samples.begin() + static_cast<std::ptrdiff_t>(config.train_size));
    dataset.scaler = fit_scaler(dataset.samples);
    for (Sample& s : dataset.samples) apply_scaler_in_place(s, dataset.scaler);

    PredictorHandle handle;
    if (config.kind == PredictorKind::lstm) {
      handle = train(dataset, config.train).handle;
    } else {
      handle.kind = config.kind;
      handle.params = LstmParams::zeros(kFeatureCount, config.train.hidden_dim);
      handle.scaler = dataset.scaler;
    }

    std::vector<Sample> predict_block(
        samples.begin() + static_cast<std::ptrdiff_t>(config.train_size),
        samples.begin() + static_cast<std::ptrdiff_t>(needed));
    for (Sample& s : predict_block) apply_scaler_in_place(s, dataset.scaler);
    const std::vector<double> preds = predict(handle, predict_block);

    for (int k = 0; k < config.horizon_days; ++k) {
      const auto ki = static_cast<std::size_t>(k);
      if (k < config.split) {
        first_preds.push_back(preds[ki]);
        first_labels.push_back(predict_block[ki].label);
      } else {
        last_preds.push_back(preds[ki]);
        last_labels.push_back(predict_block[ki].label);
      }
    }
  }

  HorizonDecayResult result;
  result.n_first = static_cast<int>(first_preds.size());
  result.n_last = static_cast<int>(last_preds.size());
  if (first_preds.size() >= 2) result.corr_first = pearson_correlation(first_preds, first_labels);
  if (last_preds.size() >= 2) result.corr_last = pearson_correlation(last_preds, last_labels);
  return result;
}

}  // namespace momo
