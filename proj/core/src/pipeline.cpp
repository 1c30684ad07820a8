#include "momo/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "momo/checkpoint.hpp"
#include "momo/errors.hpp"
#include "momo/rng.hpp"
#include "momo/svg.hpp"
#include "momo/thread_pool.hpp"
#include "momo/version.hpp"

namespace momo {
namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(std::string(what) + ": cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

/// Shared read-only inputs of one ticker's fold jobs.
struct TickerData {
  std::string ticker;
  std::size_t ticker_index = 0;
  std::vector<Sample> samples;
  OptSeries returns;  // calendar-indexed raw simple returns
  WalkForwardSchedule schedule;
};

struct JobSpec {
  const TickerData* data = nullptr;
  int fold_index = 0;
};

[[noreturn]] void rethrow_with_context(const std::string& ticker, int fold) {
  const std::string ctx = "[ticker " + ticker + " fold " + std::to_string(fold) + "] ";
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(ctx + e.what());
  } catch (const DataError& e) {
    throw DataError(ctx + e.what());
  } catch (const NumericError& e) {
    throw NumericError(ctx + e.what());
  } catch (const std::exception& e) {
    throw NumericError(ctx + e.what());
  }
}

FoldArtifact run_fold_job(const JobSpec& job, const RunConfig& config,
                          const std::vector<Date>& calendar) {
  const TickerData& data = *job.data;
  const Fold& fold = data.schedule.folds[static_cast<std::size_t>(job.fold_index)];

  FoldArtifact artifact;
  artifact.ticker = data.ticker;
  artifact.fold_index = job.fold_index;

  Dataset dataset;
  dataset.samples.assign(data.samples.begin() + static_cast<std::ptrdiff_t>(fold.train_begin),
                         data.samples.begin() + static_cast<std::ptrdiff_t>(fold.train_end));
  artifact.train_end_index_first = dataset.samples.front().end_index;
  artifact.train_end_index_last = dataset.samples.back().end_index;
  dataset.scaler = fit_scaler(dataset.samples);
  for (Sample& s : dataset.samples) apply_scaler_in_place(s, dataset.scaler);

  TrainConfig fold_config = config.lstm;
  fold_config.seed = key_hash(config.seed, config.lstm.seed, data.ticker_index,
                              static_cast<std::uint64_t>(job.fold_index));
  artifact.train_config = fold_config;

  const PredictorKind kind = predictor_kind_from_string(config.predictor);
  if (kind == PredictorKind::lstm) {
    TrainResult trained = train(dataset, fold_config);
    artifact.handle = std::move(trained.handle);
    artifact.final_loss = trained.losses.back();
  } else {
    artifact.handle.kind = kind;
    artifact.handle.params = LstmParams::zeros(kFeatureCount, fold_config.hidden_dim);
    artifact.handle.scaler = dataset.scaler;
  }

  std::vector<Sample> block(data.samples.begin() + static_cast<std::ptrdiff_t>(fold.predict_begin),
                            data.samples.begin() + static_cast<std::ptrdiff_t>(fold.predict_end));
  artifact.predicted_dates.reserve(block.size());
  for (const Sample& s : block) {
    const auto day = static_cast<std::size_t>(s.end_index + 1);
    artifact.predicted_dates.push_back(calendar[day]);
    artifact.end_indices.push_back(s.end_index);
    artifact.labels.push_back(s.label);
    artifact.persistence_scores.push_back(s.cell(s.window_len - 1, 1));
    artifact.prev_returns.push_back(*data.returns[static_cast<std::size_t>(s.end_index)]);
  }
  for (Sample& s : block) apply_scaler_in_place(s, dataset.scaler);
  artifact.scores = predict(artifact.handle, block);
  return artifact;
}

std::optional<double> pooled_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::nullopt;
  return pearson_correlation(x, y);
}

json report_to_json(const BacktestReport& report) {
  json j;
  j["start_date"] = report.start_date.to_string();
  j["end_date"] = report.end_date.to_string();
  j["market_days"] = report.market_days;
  j["in_market_days_ratio"] = report.in_market_days_ratio;
  j["position_qualified_ratio"] = report.position_qualified_ratio;
  j["commission_rate"] = report.commission_rate;
  j["equity_initial"] = report.equity_initial;
  j["equity_final"] = report.equity_final;
  j["total_return"] = report.total_return;
  j["annual_return"] = report.annual_return;
  j["win_rate"] = report.win_rate ? json(*report.win_rate) : json(nullptr);
  j["win_rate_position_days"] =
      report.win_rate_position_days ? json(*report.win_rate_position_days) : json(nullptr);
  j["max_drawdown"] = report.max_drawdown;
  return j;
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string groups_csv(const std::vector<GroupStats>& groups) {
  std::string out = "ticker,group,start,end,correlation,label_std\n";
  for (const GroupStats& g : groups) {
    out += g.ticker;
    out.push_back(',');
    out += std::to_string(g.group_index);
    out.push_back(',');
    out += g.start.to_string();
    out.push_back(',');
    out += g.end.to_string();
    out.push_back(',');
    if (g.correlation) out += format_double(*g.correlation);
    out.push_back(',');
    out += format_double(g.label_std);
    out.push_back('\n');
  }
  return out;
}

std::string fold_checkpoint_name(const std::string& ticker, int fold_index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_fold%03d", fold_index);
  return ticker + buf + ".json";
}

}  // namespace

Universe load_universe_from_csv_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("csv_dir " + dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("csv_dir " + dir.string() + " contains no .csv files");

  std::vector<PriceSeries> series_list;
  series_list.reserve(files.size());
  for (const auto& file : files) {
    series_list.push_back(parse_csv_bars(read_file(file, "csv"), file.stem().string()));
  }
  return align_universe(std::move(series_list));
}

RunArtifacts run_pipeline(const RunConfig& config) {
  validate_run_config(config);

  RunArtifacts artifacts;
  if (config.data_source.csv_dir) {
    artifacts.universe = load_universe_from_csv_dir(*config.data_source.csv_dir);
  } else {
    SyntheticResult synth = generate_synthetic_universe(*config.data_source.synthetic);
    artifacts.universe = std::move(synth.universe);
    artifacts.synthetic_clamped = synth.clamped_returns;
  }
  const Universe& universe = artifacts.universe;
  const std::vector<Date>& calendar = universe.calendar;

  // Per-ticker feature frames, samples and schedules (cheap, done serially).
  std::vector<TickerData> ticker_data;
  ticker_data.reserve(universe.series.size());
  std::size_t ticker_index = 0;
  for (const auto& [ticker, series] : universe.series) {
    const std::size_t index = ticker_index++;
    const FeatureFrame frame = build_feature_frame(series, calendar);
    const OptSeries closes = aligned_closes(series, calendar);
    OptSeries returns = returns_from_closes(closes);
    const OptSeries momentum = compute_return_momentum(returns);
    std::vector<Sample> samples = build_samples(frame, momentum, config.window_len);
    if (samples.size() <= static_cast<std::size_t>(config.train_size)) {
      artifacts.warnings.push_back("ticker " + ticker + " skipped: " +
                                   std::to_string(samples.size()) +
                                   " usable days <= train_size " +
                                   std::to_string(config.train_size));
      continue;
    }
    TickerData data;
    data.ticker = ticker;
    data.ticker_index = index;
    data.samples = std::move(samples);
    data.returns = std::move(returns);
    data.schedule = make_walk_forward_schedule(
        data.samples.size(), static_cast<std::size_t>(config.train_size),
        static_cast<std::size_t>(config.horizon));
    ticker_data.push_back(std::move(data));
  }
  if (ticker_data.empty()) {
    throw DataError("run_pipeline: no ticker has more than train_size usable days");
  }

  std::vector<JobSpec> jobs;
  for (const TickerData& data : ticker_data) {
    for (std::size_t k = 0; k < data.schedule.folds.size(); ++k) {
      jobs.push_back({&data, static_cast<int>(k)});
    }
  }

  artifacts.folds.resize(jobs.size());
  parallel_for(jobs.size(), config.workers, [&](std::size_t i) {
    try {
      artifacts.folds[i] = run_fold_job(jobs[i], config, calendar);
    } catch (...) {
      rethrow_with_context(jobs[i].data->ticker, jobs[i].fold_index);
    }
  });

  // Merge fold outputs into the daily panels.
  std::vector<double> all_preds, all_labels, all_persistence, all_ret_hat, all_ret;
  for (const FoldArtifact& fold : artifacts.folds) {
    PredLabelSeries& per = artifacts.per_ticker[fold.ticker];
    for (std::size_t i = 0; i < fold.scores.size(); ++i) {
      const Date date = fold.predicted_dates[i];
      artifacts.predictions[date][fold.ticker] = fold.scores[i];
      artifacts.labels[date][fold.ticker] = fold.labels[i];
      per.dates.push_back(date);
      per.predictions.push_back(fold.scores[i]);
      per.labels.push_back(fold.labels[i]);
      all_preds.push_back(fold.scores[i]);
      all_labels.push_back(fold.labels[i]);
      all_persistence.push_back(fold.persistence_scores[i]);
      all_ret_hat.push_back(fold.prev_returns[i] + fold.scores[i]);
      all_ret.push_back(fold.prev_returns[i] + fold.labels[i]);
    }
  }
  for (const TickerData& data : ticker_data) {
    for (std::size_t i = 0; i < data.returns.size(); ++i) {
      if (data.returns[i]) artifacts.realized[calendar[i]][data.ticker] = *data.returns[i];
    }
  }

  artifacts.backtest = run_backtest(artifacts.predictions, artifacts.realized, config.filter,
                                    config.equity_initial, config.commission_rate);
  artifacts.report = compute_metrics(artifacts.backtest, universe.series.size());

  // Analysis block.
  AnalysisSummary& analysis = artifacts.analysis;
  analysis.groups = group_correlations(artifacts.per_ticker, config.group_len);
  analysis.selection = select_high_correlation(analysis.groups);
  std::size_t defined_groups = 0;
  for (const GroupStats& g : analysis.groups) {
    if (g.correlation) ++defined_groups;
  }
  if (defined_groups >= 2) {
    analysis.dispersion_rank_correlation =
        dispersion_correlation_table(analysis.groups).rank_correlation;
  }
  analysis.pooled_correlation = pooled_pearson(all_preds, all_labels);
  analysis.persistence_correlation = pooled_pearson(all_persistence, all_labels);
  analysis.return_correlation_inverse_transform = pooled_pearson(all_ret_hat, all_ret);

  {
    const Panel restricted =
        restrict_predictions(artifacts.predictions, analysis.groups, analysis.selection);
    const BacktestResult restricted_run =
        run_backtest(restricted, artifacts.realized, config.filter, config.equity_initial,
                     config.commission_rate);
    analysis.high_correlation_report = compute_metrics(restricted_run, universe.series.size());
  }

  if (config.predictor == "lstm") {
    const std::size_t needed = static_cast<std::size_t>(config.train_size) + 40;
    bool enough = true;
    for (const TickerData& data : ticker_data) {
      if (data.samples.size() < needed) enough = false;
    }
    if (enough && ticker_data.size() == universe.series.size()) {
      HorizonDecayConfig hd;
      hd.train_size = static_cast<std::size_t>(config.train_size);
      hd.window_len = config.window_len;
      hd.train = config.lstm;
      hd.train.seed = key_hash(config.seed, config.lstm.seed, 0x4844u, 0);
      analysis.horizon_decay = horizon_decay_experiment(universe, hd);
    }
  }
  return artifacts;
}

void cmd_generate(const RunConfig& config, std::ostream& diagnostics,
                  const std::optional<std::filesystem::path>& out_override) {
  if (!config.data_source.synthetic) {
    throw ConfigError("generate: config must use a synthetic data_source");
  }
  const SyntheticSpec& spec = *config.data_source.synthetic;
  if (spec.n_days < 31) {
    diagnostics << "warning: n_days " << spec.n_days
                << " < 31, no samples will be constructible from this universe\n";
  }
  const SyntheticResult result = generate_synthetic_universe(spec);
  const std::filesystem::path data_dir =
      out_override.value_or(config.output_dir) / run_files::kDataDir;
  for (const auto& [ticker, series] : result.universe.series) {
    write_file(data_dir / (ticker + ".csv"), serialize_csv_bars(series));
  }
  diagnostics << "wrote " << result.universe.series.size() << " csv files to "
              << data_dir.string() << " (" << spec.n_days << " rows each";
  if (result.clamped_returns > 0) {
    diagnostics << ", " << result.clamped_returns << " clamped returns";
  }
  diagnostics << ")\n";
}

void cmd_run(const RunConfig& config, std::ostream& diagnostics, bool dump_features,
             bool dump_datasets, const std::optional<std::filesystem::path>& out_override) {
  const RunArtifacts artifacts = run_pipeline(config);
  const std::filesystem::path out = out_override.value_or(config.output_dir);
  std::filesystem::create_directories(out);

  for (const std::string& warning : artifacts.warnings) {
    diagnostics << "warning: " << warning << '\n';
  }

  const json config_echo = json::parse(run_config_to_json(config));

  {
    json manifest;
    manifest["config"] = config_echo;
    manifest["version"] = kVersion;
    manifest["schema_version"] = kOutputSchemaVersion;
    write_file(out / run_files::kManifest, manifest.dump(2) + "\n");
  }
  {
    json report = report_to_json(artifacts.report);
    report["config"] = config_echo;
    write_file(out / run_files::kReport, report.dump(2) + "\n");
  }
  {
    std::string equity = "date,equity\n";
    for (std::size_t i = 0; i < artifacts.backtest.curve.dates.size(); ++i) {
      equity += artifacts.backtest.curve.dates[i].to_string();
      equity.push_back(',');
      equity += format_double(artifacts.backtest.curve.equity[i]);
      equity.push_back('\n');
    }
    write_file(out / run_files::kEquity, equity);
  }
  {
    std::string trades = "ticker,open_date,close_date,net_pnl,win\n";
    for (const TradeEpisode& t : artifacts.backtest.trades) {
      trades += t.ticker;
      trades.push_back(',');
      trades += t.open_date.to_string();
      trades.push_back(',');
      trades += t.close_date.to_string();
      trades.push_back(',');
      trades += format_double(t.net_pnl);
      trades.push_back(',');
      trades += t.win ? '1' : '0';
      trades.push_back('\n');
    }
    write_file(out / run_files::kTrades, trades);
  }
  {
    std::string preds = "ticker,fold,date,score,label\n";
    for (const FoldArtifact& fold : artifacts.folds) {
      for (std::size_t i = 0; i < fold.scores.size(); ++i) {
        preds += fold.ticker;
        preds.push_back(',');
        preds += std::to_string(fold.fold_index);
        preds.push_back(',');
        preds += fold.predicted_dates[i].to_string();
        preds.push_back(',');
        preds += format_double(fold.scores[i]);
        preds.push_back(',');
        preds += format_double(fold.labels[i]);
        preds.push_back('\n');
      }
    }
    write_file(out / run_files::kPredictions, preds);
  }
  write_file(out / run_files::kGroups, groups_csv(artifacts.analysis.groups));
  {
    const AnalysisSummary& a = artifacts.analysis;
    json summary;
    json selection;
    for (const auto& [group, tickers] : a.selection) {
      selection[std::to_string(group)] = std::vector<std::string>(tickers.begin(), tickers.end());
    }
    summary["selection"] = std::move(selection);
    summary["dispersion_rank_correlation"] = optional_to_json(a.dispersion_rank_correlation);
    summary["pooled_correlation"] = optional_to_json(a.pooled_correlation);
    summary["persistence_correlation"] = optional_to_json(a.persistence_correlation);
    summary["return_correlation_inverse_transform"] =
        optional_to_json(a.return_correlation_inverse_transform);
    if (a.horizon_decay) {
      json hd;
      hd["corr_first20"] = optional_to_json(a.horizon_decay->corr_first);
      hd["corr_last20"] = optional_to_json(a.horizon_decay->corr_last);
      hd["n_first"] = a.horizon_decay->n_first;
      hd["n_last"] = a.horizon_decay->n_last;
      summary["horizon_decay"] = std::move(hd);
    } else {
      summary["horizon_decay"] = nullptr;
    }
    summary["high_correlation_backtest"] =
        a.high_correlation_report ? report_to_json(*a.high_correlation_report) : json(nullptr);
    write_file(out / run_files::kSummary, summary.dump(2) + "\n");
  }
  if (predictor_kind_from_string(config.predictor) == PredictorKind::lstm) {
    const std::filesystem::path ckpt_dir = out / run_files::kCheckpointDir;
    std::filesystem::create_directories(ckpt_dir);
    for (const FoldArtifact& fold : artifacts.folds) {
      save_checkpoint(fold.handle, fold.train_config,
                      ckpt_dir / fold_checkpoint_name(fold.ticker, fold.fold_index));
    }
  }
  if (dump_features) {
    for (const auto& [ticker, series] : artifacts.universe.series) {
      const FeatureFrame frame = build_feature_frame(series, artifacts.universe.calendar);
      write_file(out / "features" / (ticker + ".csv"), serialize_feature_csv(frame));
    }
  }
  if (dump_datasets) {
    for (const FoldArtifact& fold : artifacts.folds) {
      json dump;
      dump["ticker"] = fold.ticker;
      dump["fold"] = fold.fold_index;
      dump["train_end_index_first"] = fold.train_end_index_first;
      dump["train_end_index_last"] = fold.train_end_index_last;
      json end_days = json::array();
      for (const std::ptrdiff_t e : fold.end_indices) end_days.push_back(e);
      dump["predict_end_indices"] = std::move(end_days);
      json predict_dates = json::array();
      for (const Date& d : fold.predicted_dates) predict_dates.push_back(d.to_string());
      dump["predict_dates"] = std::move(predict_dates);
      dump["scaler"] = {{"mean", fold.handle.scaler.mean},
                        {"scale", fold.handle.scaler.scale},
                        {"degenerate", fold.handle.scaler.degenerate}};
      write_file(out / "datasets" / fold_checkpoint_name(fold.ticker, fold.fold_index),
                 dump.dump(2) + "\n");
    }
  }

  diagnostics << "run complete: " << artifacts.folds.size() << " folds, "
              << artifacts.report.market_days << " market days, final equity "
              << format_double(artifacts.report.equity_final) << '\n';
}

void cmd_report(const std::filesystem::path& run_dir, bool emit_svg, std::ostream& out) {
  const std::filesystem::path manifest_path = run_dir / run_files::kManifest;
  if (!std::filesystem::exists(manifest_path)) {
    throw DataError("report: missing manifest " + manifest_path.string());
  }
  json manifest;
  json report;
  try {
    manifest = json::parse(read_file(manifest_path, "manifest"));
    report = json::parse(read_file(run_dir / run_files::kReport, "report"));
  } catch (const json::exception& e) {
    throw DataError(std::string("report: corrupt run directory: ") + e.what());
  }

  auto pct6 = [](double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f %%", v * 100.0);
    return std::string(buf);
  };
  auto pct_short = [](double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g %%", v * 100.0);
    return std::string(buf);
  };
  auto currency = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };

  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("Start Date", report.at("start_date").get<std::string>());
  rows.emplace_back("End Date", report.at("end_date").get<std::string>());
  rows.emplace_back("Market Days", std::to_string(report.at("market_days").get<long>()));
  rows.emplace_back("In the Market Days", pct6(report.at("in_market_days_ratio").get<double>()));
  rows.emplace_back("Position Qualified",
                    pct6(report.at("position_qualified_ratio").get<double>()));
  // Row label kept letter-for-letter as printed in the strategy result table.
  rows.emplace_back("Commision", pct_short(report.at("commission_rate").get<double>()));
  rows.emplace_back("Equity Initial", currency(report.at("equity_initial").get<double>()));
  rows.emplace_back("Equity Final", currency(report.at("equity_final").get<double>()));
  rows.emplace_back("Return", pct6(report.at("total_return").get<double>()));
  rows.emplace_back("Ann. Return", pct6(report.at("annual_return").get<double>()));
  const json& win = report.at("win_rate");
  rows.emplace_back("Win Rate", win.is_null() ? "n/a" : pct6(win.get<double>()));
  rows.emplace_back("Max. Drawdown", pct6(report.at("max_drawdown").get<double>()));

  out << "Property            Value\n";
  for (const auto& [name, value] : rows) {
    out << name;
    for (std::size_t pad = name.size(); pad < 20; ++pad) out.put(' ');
    out << value << '\n';
  }

  if (emit_svg) {
    const std::string equity_text = read_file(run_dir / run_files::kEquity, "equity curve");
    std::vector<Date> dates;
    std::vector<double> values;
    std::istringstream lines(equity_text);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw DataError("report: malformed equity.csv row");
      dates.push_back(Date::parse(line.substr(0, comma)));
      double v = 0.0;
      const std::string cell = line.substr(comma + 1);
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc()) throw DataError("report: malformed equity value " + cell);
      values.push_back(v);
    }
    write_file(run_dir / "equity.svg", svg_line_chart(dates, values, "Cumulative equity"));

    const std::filesystem::path groups_path = run_dir / run_files::kGroups;
    if (std::filesystem::exists(groups_path)) {
      std::vector<double> xs;
      std::vector<double> ys;
      std::istringstream group_lines(read_file(groups_path, "groups"));
      std::getline(group_lines, line);  // header
      while (std::getline(group_lines, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
          const auto comma = line.find(',', start);
          if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
          }
          cells.push_back(line.substr(start, comma - start));
          start = comma + 1;
        }
        if (cells.size() != 6 || cells[4].empty()) continue;
        xs.push_back(std::stod(cells[5]));
        ys.push_back(std::stod(cells[4]));
      }
      if (!xs.empty()) {
        write_file(run_dir / "dispersion.svg",
                   svg_scatter(xs, ys, "Label dispersion vs correlation", "label std",
                               "correlation"));
      }
    }
    out << "wrote " << (run_dir / "equity.svg").string() << '\n';
  }
}

}  // namespace momo
