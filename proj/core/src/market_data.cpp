#include "momo/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "momo/errors.hpp"
#include "momo/rng.hpp"

namespace momo {
namespace {

constexpr std::string_view kHeader = "date,open,high,low,close,volume";

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_int64(std::string_view s, std::int64_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void row_error(std::string_view ticker, int line, const std::string& what) {
  throw DataError("csv " + std::string(ticker) + " line " + std::to_string(line) + ": " + what);
}

}  // namespace

void validate_bar(const Bar& bar, int line) {
  const std::string where = line >= 1 ? " (line " + std::to_string(line) + ")" : "";
  auto fail = [&](const std::string& what) {
    throw DataError("bar " + bar.date.to_string() + where + ": " + what);
  };
  if (!(bar.open > 0.0) || !(bar.high > 0.0) || !(bar.low > 0.0) || !(bar.close > 0.0)) {
    fail("non-positive price");
  }
  if (!std::isfinite(bar.open) || !std::isfinite(bar.high) || !std::isfinite(bar.low) ||
      !std::isfinite(bar.close)) {
    fail("non-finite price");
  }
  if (bar.low > std::min(bar.open, bar.close) || bar.high < std::max(bar.open, bar.close)) {
    fail("inconsistent OHLC range (low must bound min(open,close), high must bound max)");
  }
  if (bar.volume < 0) fail("negative volume");
}

void validate_spec(const SyntheticSpec& spec) {
  auto fail = [](const std::string& what) { throw ConfigError("synthetic spec: " + what); };
  if (spec.n_tickers < 1) fail("n_tickers must be >= 1");
  // 31 days is the minimum to emit one sample downstream; shorter histories
  // are generable (the CLI warns) but cannot feed the model.
  if (spec.n_days < 2) fail("n_days must be >= 2");
  if (!(spec.sigma > 0.0)) fail("sigma must be > 0");
  if (!(spec.init_price > 0.0)) fail("init_price must be > 0");
  if (std::abs(spec.phi1) + std::abs(spec.phi2) >= 1.0) {
    fail("|phi1| + |phi2| must be < 1 (stationary return process)");
  }
  if (spec.base_volume < 1) fail("base_volume must be >= 1");
  if (spec.volume_noise < 0.0) fail("volume_noise must be >= 0");
}

PriceSeries parse_csv_bars(std::string_view text, std::string ticker) {
  if (ticker.empty()) throw DataError("empty ticker symbol");
  PriceSeries series;
  series.ticker = std::move(ticker);

  std::size_t pos = 0;
  int line_no = 0;
  bool saw_header = false;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line;
    if (eol == std::string_view::npos) {
      line = text.substr(pos);
      pos = text.size() + 1;
    } else {
      line = text.substr(pos, eol - pos);
      pos = eol + 1;
    }
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line.empty()) continue;

    if (!saw_header) {
      if (line != kHeader) {
        row_error(series.ticker, line_no,
                  "expected header '" + std::string(kHeader) + "', got '" + std::string(line) + "'");
      }
      saw_header = true;
      continue;
    }

    const auto fields = split_fields(line);
    if (fields.size() != 6) {
      row_error(series.ticker, line_no,
                "expected 6 fields, got " + std::to_string(fields.size()));
    }
    Bar bar;
    if (!Date::try_parse(fields[0], bar.date)) {
      row_error(series.ticker, line_no, "bad date '" + std::string(fields[0]) + "'");
    }
    const char* names[4] = {"open", "high", "low", "close"};
    double* slots[4] = {&bar.open, &bar.high, &bar.low, &bar.close};
    for (int i = 0; i < 4; ++i) {
      if (!parse_double(fields[static_cast<std::size_t>(i + 1)], *slots[i])) {
        row_error(series.ticker, line_no, std::string("bad ") + names[i] + " '" +
                                              std::string(fields[static_cast<std::size_t>(i + 1)]) + "'");
      }
    }
    if (!parse_int64(fields[5], bar.volume)) {
      row_error(series.ticker, line_no, "bad volume '" + std::string(fields[5]) + "'");
    }
    try {
      validate_bar(bar);
    } catch (const DataError& e) {
      row_error(series.ticker, line_no, e.what());
    }
    series.bars.push_back(bar);
  }
  if (!saw_header) throw DataError("csv " + series.ticker + ": empty document");

  std::stable_sort(series.bars.begin(), series.bars.end(),
                   [](const Bar& a, const Bar& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < series.bars.size(); ++i) {
    if (series.bars[i].date == series.bars[i - 1].date) {
      throw DataError("csv " + series.ticker + ": duplicate date " +
                      series.bars[i].date.to_string());
    }
  }
  return series;
}

std::string serialize_csv_bars(const PriceSeries& series) {
  std::string out(kHeader);
  out.push_back('\n');
  for (const Bar& bar : series.bars) {
    out += bar.date.to_string();
    out.push_back(',');
    out += format_double(bar.open);
    out.push_back(',');
    out += format_double(bar.high);
    out.push_back(',');
    out += format_double(bar.low);
    out.push_back(',');
    out += format_double(bar.close);
    out.push_back(',');
    out += std::to_string(bar.volume);
    out.push_back('\n');
  }
  return out;
}

Universe align_universe(std::vector<PriceSeries> series_list) {
  if (series_list.empty()) throw DataError("align_universe: empty series list");
  Universe universe;
  std::set<Date> dates;
  for (PriceSeries& s : series_list) {
    if (s.ticker.empty()) throw DataError("align_universe: empty ticker symbol");
    if (s.bars.empty()) throw DataError("align_universe: series " + s.ticker + " has no bars");
    for (std::size_t i = 1; i < s.bars.size(); ++i) {
      if (!(s.bars[i - 1].date < s.bars[i].date)) {
        throw DataError("align_universe: series " + s.ticker + " dates not strictly increasing");
      }
    }
    for (const Bar& b : s.bars) dates.insert(b.date);
    auto [it, inserted] = universe.series.emplace(s.ticker, std::move(s));
    if (!inserted) throw DataError("align_universe: duplicate ticker " + it->first);
  }
  universe.calendar.assign(dates.begin(), dates.end());
  return universe;
}

std::string synthetic_ticker(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "SYN%03d", index);
  return buf;
}

Date synthetic_start_date() { return Date::from_ymd(2018, 1, 2); }

SyntheticResult generate_synthetic_universe(const SyntheticSpec& spec) {
  validate_spec(spec);

  // Streams: 0 = return shock, 1 = high/low jitter, 2 = volume noise.
  constexpr std::uint64_t kReturnStream = 0;
  constexpr std::uint64_t kRangeStream = 1;
  constexpr std::uint64_t kVolumeStream = 2;

  std::vector<Date> calendar;
  calendar.reserve(static_cast<std::size_t>(spec.n_days));
  Date d = synthetic_start_date();
  for (int t = 0; t < spec.n_days; ++t) {
    calendar.push_back(d);
    d = d.next_weekday();
  }

  SyntheticResult result;
  result.universe.calendar = calendar;

  for (int k = 0; k < spec.n_tickers; ++k) {
    const auto ticker_key = static_cast<std::uint64_t>(k);
    PriceSeries series;
    series.ticker = synthetic_ticker(k);
    series.bars.reserve(static_cast<std::size_t>(spec.n_days));

    double r_prev = 0.0;
    double r_prev2 = 0.0;
    double close = spec.init_price;
    double prev_close = spec.init_price;
    for (int t = 0; t < spec.n_days; ++t) {
      const auto day_key = static_cast<std::uint64_t>(t);
      const double eps = keyed_normal(spec.seed, ticker_key, day_key, kReturnStream);
      double r = spec.phi1 * r_prev + spec.phi2 * r_prev2 + spec.sigma * eps;
      if (t > 0) {
        if (r < -0.5) {
          r = -0.5;
          ++result.clamped_returns;
        }
        close = prev_close * (1.0 + r);
      }
      r_prev2 = r_prev;
      r_prev = r;

      const double eta = keyed_normal(spec.seed, ticker_key, day_key, kRangeStream);
      const double zeta = keyed_normal(spec.seed, ticker_key, day_key, kVolumeStream);
      Bar bar;
      bar.date = calendar[static_cast<std::size_t>(t)];
      bar.open = prev_close;
      bar.close = close;
      bar.high = std::max(bar.open, bar.close) * (1.0 + std::abs(eta) * 0.001);
      bar.low = std::min(bar.open, bar.close) * (1.0 - std::abs(eta) * 0.001);
      bar.volume = std::llround(static_cast<double>(spec.base_volume) *
                                (1.0 + spec.volume_noise * std::abs(zeta)));
      validate_bar(bar);
      series.bars.push_back(bar);
      prev_close = close;
    }
    result.universe.series.emplace(series.ticker, std::move(series));
  }
  return result;
}

}  // namespace momo
