#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "momo/calendar.hpp"

namespace momo {

/// No-trade band and shrinkage constant of the score filter.
struct FilterConfig {
  double no_trade_band = 0.005;   // tau
  double shrink_constant = 0.005; // c
};

/// Throws ConfigError unless tau >= 0, c >= 0 and tau >= c.
void validate_filter(const FilterConfig& cfg);

/// |score| <= tau -> 0; score > tau -> score - c; score < -tau -> score + c.
double filter_and_shrink(double score, const FilterConfig& cfg);

using PositionMap = std::map<std::string, double>;

/// position_i = equity * s_i / sum |s_j| over nonzero scores; empty map when
/// every score is zero (all-cash day). Gross exposure equals equity.
PositionMap allocate_positions(const PositionMap& adjusted_scores, double equity);

struct DayResult {
  double pnl = 0.0;
  double costs = 0.0;
};

/// pnl = sum position * realized return; costs = commission_rate * turnover
/// versus prev_book. Throws DataError when a held ticker has no realized
/// return.
DayResult step_day(const PositionMap& book, const PositionMap& realized_returns,
                   const PositionMap& prev_book, double commission_rate);

/// Per-day per-ticker values keyed by date then ticker. A date key with an
/// empty map is a valid all-cash trading day.
using Panel = std::map<Date, std::map<std::string, double>>;

/// Close-of-day equity per market day; the path conceptually begins at
/// start_equity on the first date.
struct EquityCurve {
  double start_equity = 0.0;
  std::vector<Date> dates;
  std::vector<double> equity;
};

/// One maximal contiguous run of nonzero positions in one ticker.
struct TradeEpisode {
  std::string ticker;
  Date open_date;
  Date close_date;
  double net_pnl = 0.0;  // after commission, including entry and exit turnover
  bool win = false;
};

struct BacktestResult {
  EquityCurve curve;
  std::vector<PositionMap> books;  // aligned with curve.dates
  std::vector<TradeEpisode> trades;
  double commission_rate = 0.0;
  long position_days = 0;
  long winning_position_days = 0;
};

/// Daily loop of filter -> allocate -> settle over the prediction panel.
/// Positions are rebalanced every day; day d's positions earn day d's
/// realized returns. Throws NumericError on bankruptcy (equity <= 0).
BacktestResult run_backtest(const Panel& predictions, const Panel& realized,
                            const FilterConfig& cfg, double equity_initial,
                            double commission_rate);

/// Largest peak-to-trough fractional decline over the path.
double max_drawdown(std::span<const double> equity);

struct BacktestReport {
  Date start_date;
  Date end_date;
  long market_days = 0;
  double in_market_days_ratio = 0.0;
  double position_qualified_ratio = 0.0;
  double commission_rate = 0.0;
  double equity_initial = 0.0;
  double equity_final = 0.0;
  double total_return = 0.0;
  double annual_return = 0.0;
  std::optional<double> win_rate;                // episodes; empty when no trades
  std::optional<double> win_rate_position_days;  // position-day variant
  double max_drawdown = 0.0;
};

/// The five summary benchmarks plus the report identities
/// total_return = equity_final/equity_initial - 1 and
/// annual_return = (1 + total_return)^(252/market_days) - 1.
/// Throws ConfigError when universe_size is 0, DataError on an empty curve.
BacktestReport compute_metrics(const EquityCurve& curve, std::span<const PositionMap> books,
                               std::span<const TradeEpisode> trades, std::size_t universe_size,
                               double commission_rate);

/// compute_metrics plus the position-day win-rate variant.
BacktestReport compute_metrics(const BacktestResult& result, std::size_t universe_size);

}  // namespace momo
