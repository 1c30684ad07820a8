#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "momo/analysis.hpp"
#include "momo/backtest.hpp"
#include "momo/config.hpp"
#include "momo/market_data.hpp"
#include "momo/predictor.hpp"

namespace momo {

/// Output of one (ticker, fold) training/prediction job.
struct FoldArtifact {
  std::string ticker;
  int fold_index = 0;
  PredictorHandle handle;
  TrainConfig train_config;  // effective per-fold config (derived seed)
  std::vector<Date> predicted_dates;
  std::vector<std::ptrdiff_t> end_indices;  // window end per prediction
  std::vector<double> scores;
  std::vector<double> labels;             // true next-day return momentum
  std::vector<double> persistence_scores; // last-day raw momentum per window
  std::vector<double> prev_returns;       // raw return at the window's end day
  std::ptrdiff_t train_end_index_first = 0;  // end day of the oldest training sample
  std::ptrdiff_t train_end_index_last = 0;   // end day of the newest training sample
  double final_loss = 0.0;
};

struct AnalysisSummary {
  std::vector<GroupStats> groups;
  std::map<int, std::set<std::string>> selection;
  std::optional<double> dispersion_rank_correlation;
  std::optional<HorizonDecayResult> horizon_decay;
  std::optional<double> pooled_correlation;
  std::optional<double> persistence_correlation;
  /// Correlation after mapping momentum predictions back to returns
  /// (r_hat = prev return + predicted momentum) against realized returns.
  std::optional<double> return_correlation_inverse_transform;
  std::optional<BacktestReport> high_correlation_report;
};

struct RunArtifacts {
  Universe universe;
  std::int64_t synthetic_clamped = 0;
  Panel predictions;
  Panel labels;
  Panel realized;
  std::map<std::string, PredLabelSeries> per_ticker;
  std::vector<FoldArtifact> folds;
  BacktestResult backtest;
  BacktestReport report;
  AnalysisSummary analysis;
  std::vector<std::string> warnings;  // e.g. tickers skipped for short history
};

/// Per-ticker CSV files (<ticker>.csv) from a directory.
Universe load_universe_from_csv_dir(const std::filesystem::path& dir);

/// The full walk-forward pipeline: features, schedule, per-(ticker, fold)
/// train/predict on a worker pool, backtest, analysis. Pure function of the
/// config; two calls yield identical artifacts.
RunArtifacts run_pipeline(const RunConfig& config);

/// `generate`: write one CSV per ticker into <output_dir>/data. `out_override`
/// redirects the writes without touching the config echo, so reports stay
/// byte-identical across output locations.
void cmd_generate(const RunConfig& config, std::ostream& diagnostics,
                  const std::optional<std::filesystem::path>& out_override = std::nullopt);

/// `run`: run_pipeline + write report.json, equity.csv, trades.csv, analysis
/// outputs, per-fold checkpoints and predictions, and the manifest.
void cmd_run(const RunConfig& config, std::ostream& diagnostics, bool dump_features = false,
             bool dump_datasets = false,
             const std::optional<std::filesystem::path>& out_override = std::nullopt);

/// `report`: render the summary table of a completed run directory.
void cmd_report(const std::filesystem::path& run_dir, bool emit_svg, std::ostream& out);

/// Where cmd_run writes each artifact, relative to the output directory.
namespace run_files {
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kEquity = "equity.csv";
inline constexpr const char* kTrades = "trades.csv";
inline constexpr const char* kPredictions = "predictions.csv";
inline constexpr const char* kGroups = "analysis/groups.csv";
inline constexpr const char* kSummary = "analysis/summary.json";
inline constexpr const char* kCheckpointDir = "checkpoints";
inline constexpr const char* kDataDir = "data";
}  // namespace run_files

}  // namespace momo
