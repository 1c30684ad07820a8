#include "momo/backtest.hpp"

#include <cmath>

#include "momo/errors.hpp"

namespace momo {
namespace {

constexpr double kTradingDaysPerYear = 252.0;

/// Open trade episode being accumulated during the daily loop.
struct OpenEpisode {
  Date open_date;
  Date last_nonzero_date;
  double net_pnl = 0.0;
};

}  // namespace

void validate_filter(const FilterConfig& cfg) {
  if (!(cfg.no_trade_band >= 0.0)) throw ConfigError("filter: no_trade_band must be >= 0");
  if (!(cfg.shrink_constant >= 0.0)) throw ConfigError("filter: shrink_constant must be >= 0");
  if (cfg.no_trade_band < cfg.shrink_constant) {
    throw ConfigError("filter: no_trade_band must be >= shrink_constant");
  }
}

double filter_and_shrink(double score, const FilterConfig& cfg) {
  if (std::abs(score) <= cfg.no_trade_band) return 0.0;
  return score > 0.0 ? score - cfg.shrink_constant : score + cfg.shrink_constant;
}

PositionMap allocate_positions(const PositionMap& adjusted_scores, double equity) {
  if (!(equity > 0.0)) throw NumericError("allocate_positions: equity must be > 0");
  double gross = 0.0;
  for (const auto& [ticker, score] : adjusted_scores) gross += std::abs(score);
  PositionMap book;
  if (gross == 0.0) return book;
  for (const auto& [ticker, score] : adjusted_scores) {
    if (score != 0.0) book[ticker] = equity * score / gross;
  }
  return book;
}

DayResult step_day(const PositionMap& book, const PositionMap& realized_returns,
                   const PositionMap& prev_book, double commission_rate) {
  DayResult day;
  for (const auto& [ticker, position] : book) {
    const auto it = realized_returns.find(ticker);
    if (it == realized_returns.end()) {
      throw DataError("step_day: missing realized return for held ticker " + ticker);
    }
    day.pnl += position * it->second;
  }
  double turnover = 0.0;
  for (const auto& [ticker, position] : book) {
    const auto it = prev_book.find(ticker);
    const double prev = it == prev_book.end() ? 0.0 : it->second;
    turnover += std::abs(position - prev);
  }
  for (const auto& [ticker, prev] : prev_book) {
    if (book.find(ticker) == book.end()) turnover += std::abs(prev);
  }
  day.costs = commission_rate * turnover;
  return day;
}

BacktestResult run_backtest(const Panel& predictions, const Panel& realized,
                            const FilterConfig& cfg, double equity_initial,
                            double commission_rate) {
  validate_filter(cfg);
  if (!(equity_initial > 0.0)) throw ConfigError("run_backtest: equity_initial must be > 0");
  if (commission_rate < 0.0) throw ConfigError("run_backtest: commission_rate must be >= 0");

  BacktestResult result;
  result.commission_rate = commission_rate;
  result.curve.start_equity = equity_initial;

  double equity = equity_initial;
  PositionMap prev_book;
  std::map<std::string, OpenEpisode> open_episodes;

  static const PositionMap kEmpty;
  for (const auto& [date, raw_scores] : predictions) {
    PositionMap adjusted;
    for (const auto& [ticker, score] : raw_scores) {
      const double s = filter_and_shrink(score, cfg);
      if (s != 0.0) adjusted[ticker] = s;
    }
    PositionMap book = allocate_positions(adjusted, equity);

    const auto realized_it = realized.find(date);
    const PositionMap& returns = realized_it == realized.end() ? kEmpty : realized_it->second;
    const DayResult day = step_day(book, returns, prev_book, commission_rate);
    equity += day.pnl - day.costs;

    // Attribute per-ticker daily pnl and turnover cost to trade episodes.
    for (const auto& [ticker, position] : book) {
      const auto prev_it = prev_book.find(ticker);
      const double prev = prev_it == prev_book.end() ? 0.0 : prev_it->second;
      const double ticker_pnl = position * returns.at(ticker);
      const double ticker_cost = commission_rate * std::abs(position - prev);
      const double net = ticker_pnl - ticker_cost;

      auto [ep_it, opened] = open_episodes.try_emplace(ticker);
      if (opened) ep_it->second.open_date = date;
      ep_it->second.last_nonzero_date = date;
      ep_it->second.net_pnl += net;

      ++result.position_days;
      if (net > 0.0) ++result.winning_position_days;
    }
    for (const auto& [ticker, prev] : prev_book) {
      if (book.find(ticker) != book.end()) continue;
      const auto ep_it = open_episodes.find(ticker);
      if (ep_it == open_episodes.end()) continue;
      // Closing turnover belongs to the episode that just ended.
      ep_it->second.net_pnl -= commission_rate * std::abs(prev);
      result.trades.push_back({ticker, ep_it->second.open_date, ep_it->second.last_nonzero_date,
                               ep_it->second.net_pnl, ep_it->second.net_pnl > 0.0});
      open_episodes.erase(ep_it);
    }

    if (!(equity > 0.0)) {
      throw NumericError("run_backtest: bankruptcy on " + date.to_string() + " (equity " +
                         std::to_string(equity) + ")");
    }
    result.curve.dates.push_back(date);
    result.curve.equity.push_back(equity);
    result.books.push_back(book);
    prev_book = std::move(book);
  }

  // Episodes still open at the end of the simulation close on their last day.
  for (auto& [ticker, episode] : open_episodes) {
    result.trades.push_back(
        {ticker, episode.open_date, episode.last_nonzero_date, episode.net_pnl,
         episode.net_pnl > 0.0});
  }
  return result;
}

double max_drawdown(std::span<const double> equity) {
  double peak = 0.0;
  double worst = 0.0;
  bool have_peak = false;
  for (double value : equity) {
    if (!have_peak || value > peak) {
      peak = value;
      have_peak = true;
    }
    if (peak > 0.0) {
      const double dd = (peak - value) / peak;
      if (dd > worst) worst = dd;
    }
  }
  return worst;
}

BacktestReport compute_metrics(const EquityCurve& curve, std::span<const PositionMap> books,
                               std::span<const TradeEpisode> trades, std::size_t universe_size,
                               double commission_rate) {
  if (curve.dates.empty() || curve.equity.size() != curve.dates.size()) {
    throw DataError("compute_metrics: empty or inconsistent equity curve");
  }
  if (universe_size == 0) throw ConfigError("compute_metrics: universe_size must be > 0");
  if (books.size() != curve.dates.size()) {
    throw DataError("compute_metrics: book history does not match curve");
  }

  BacktestReport report;
  report.start_date = curve.dates.front();
  report.end_date = curve.dates.back();
  report.market_days = static_cast<long>(curve.dates.size());
  report.commission_rate = commission_rate;
  report.equity_initial = curve.start_equity;
  report.equity_final = curve.equity.back();
  report.total_return = report.equity_final / report.equity_initial - 1.0;
  report.annual_return =
      std::pow(1.0 + report.total_return,
               kTradingDaysPerYear / static_cast<double>(report.market_days)) -
      1.0;

  long in_market_days = 0;
  long nonzero_positions = 0;
  for (const PositionMap& book : books) {
    long held = 0;
    for (const auto& [ticker, position] : book) {
      if (position != 0.0) ++held;
    }
    nonzero_positions += held;
    if (held > 0) ++in_market_days;
  }
  report.in_market_days_ratio =
      static_cast<double>(in_market_days) / static_cast<double>(report.market_days);
  report.position_qualified_ratio =
      static_cast<double>(nonzero_positions) /
      (static_cast<double>(universe_size) * static_cast<double>(report.market_days));

  if (!trades.empty()) {
    long wins = 0;
    for (const TradeEpisode& t : trades) {
      if (t.win) ++wins;
    }
    report.win_rate = static_cast<double>(wins) / static_cast<double>(trades.size());
  }

  std::vector<double> path;
  path.reserve(curve.equity.size() + 1);
  path.push_back(curve.start_equity);
  path.insert(path.end(), curve.equity.begin(), curve.equity.end());
  report.max_drawdown = max_drawdown(path);
  return report;
}

BacktestReport compute_metrics(const BacktestResult& result, std::size_t universe_size) {
  BacktestReport report = compute_metrics(result.curve, result.books, result.trades,
                                          universe_size, result.commission_rate);
  if (result.position_days > 0) {
    report.win_rate_position_days = static_cast<double>(result.winning_position_days) /
                                    static_cast<double>(result.position_days);
  }
  return report;
}

}  // namespace momo
