#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "momo/calendar.hpp"

namespace momo {

/// One trading day of a single ticker.
struct Bar {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::int64_t volume = 0;
};

/// Throws DataError when the bar violates its invariants
/// (positive prices, low <= min(open, close) <= max(open, close) <= high,
/// non-negative volume). `line` >= 1 is included in the message when known.
void validate_bar(const Bar& bar, int line = -1);

/// One ticker's dated OHLCV history, bars strictly ascending by date.
struct PriceSeries {
  std::string ticker;
  std::vector<Bar> bars;

  std::size_t size() const { return bars.size(); }
};

/// A set of aligned series plus the union trading calendar.
struct Universe {
  std::map<std::string, PriceSeries> series;
  std::vector<Date> calendar;

  std::size_t n_tickers() const { return series.size(); }
};

/// Parameters of the seeded synthetic universe generator. Returns follow an
/// AR(2) process, prices compound from init_price, volumes are base volume
/// plus scaled half-normal noise.
struct SyntheticSpec {
  int n_tickers = 3;
  int n_days = 600;
  std::uint64_t seed = 1;
  double phi1 = 0.3;
  double phi2 = -0.2;
  double sigma = 0.01;
  double init_price = 100.0;
  std::int64_t base_volume = 1'000'000;
  double volume_noise = 0.1;
};

/// Throws ConfigError on inadmissible parameters (n_days < 2, sigma <= 0,
/// init_price <= 0, |phi1| + |phi2| >= 1, n_tickers < 1, base_volume < 1,
/// volume_noise < 0). Histories shorter than 31 days generate fine but feed
/// no training samples downstream.
void validate_spec(const SyntheticSpec& spec);

struct SyntheticResult {
  Universe universe;
  /// Number of generated returns clamped at the -0.5 floor that keeps prices positive.
  std::int64_t clamped_returns = 0;
};

/// Parse one ticker's CSV document (header `date,open,high,low,close,volume`).
/// Rows may arrive out of order and are sorted; duplicate dates, malformed
/// rows and OHLC inconsistencies raise DataError naming the 1-based line.
PriceSeries parse_csv_bars(std::string_view text, std::string ticker);

/// Exact inverse of parse_csv_bars: emits the same header and one row per bar
/// with shortest round-trip number formatting.
std::string serialize_csv_bars(const PriceSeries& series);

/// Build a Universe whose calendar is the sorted union of all series dates.
/// Gaps are not filled. Throws DataError on an empty input list, an empty
/// series, or a duplicate ticker.
Universe align_universe(std::vector<PriceSeries> series_list);

/// Deterministic universe from a spec: same spec, same bars, bit for bit.
SyntheticResult generate_synthetic_universe(const SyntheticSpec& spec);

/// Ticker symbol of the i-th synthetic series (SYN000, SYN001, ...).
std::string synthetic_ticker(int index);

/// First trading date of synthetic calendars.
Date synthetic_start_date();

}  // namespace momo
