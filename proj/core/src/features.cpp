#include "momo/features.hpp"

#include <algorithm>
#include <charconv>

#include "momo/errors.hpp"

namespace momo {
namespace {

OptSeries ratio_minus_one(const OptSeries& values, int lag) {
  OptSeries out(values.size());
  for (std::size_t i = static_cast<std::size_t>(lag); i < values.size(); ++i) {
    const auto& cur = values[i];
    const auto& prev = values[i - static_cast<std::size_t>(lag)];
    if (cur && prev) out[i] = *cur / *prev - 1.0;
  }
  return out;
}

OptSeries difference(const OptSeries& values) {
  OptSeries out(values.size());
  for (std::size_t i = 1; i < values.size(); ++i) {
    const auto& cur = values[i];
    const auto& prev = values[i - 1];
    if (cur && prev) out[i] = *cur - *prev;
  }
  return out;
}

OptSeries dense_closes(const PriceSeries& series) {
  OptSeries closes(series.bars.size());
  for (std::size_t i = 0; i < series.bars.size(); ++i) closes[i] = series.bars[i].close;
  return closes;
}

OptSeries volume_velocity_kernel(const OptSeries& volumes) {
  OptSeries out(volumes.size());
  for (std::size_t i = 1; i < volumes.size(); ++i) {
    const auto& cur = volumes[i];
    const auto& prev = volumes[i - 1];
    if (cur && prev && *prev > 0.0) out[i] = *cur / *prev - 1.0;
  }
  return out;
}

FeatureFrame assemble_frame(std::string ticker, std::vector<Date> dates, const OptSeries& closes,
                            const OptSeries& volumes) {
  const OptSeries returns = ratio_minus_one(closes, 1);
  const OptSeries momentum = difference(returns);
  const OptSeries acceleration = difference(momentum);
  const OptSeries week = ratio_minus_one(closes, kWeekLookback);
  const OptSeries month = ratio_minus_one(closes, kMonthLookback);
  const OptSeries velocity = volume_velocity_kernel(volumes);

  FeatureFrame frame;
  frame.ticker = std::move(ticker);
  frame.dates = std::move(dates);
  frame.rows.resize(closes.size());
  for (std::size_t i = 0; i < closes.size(); ++i) {
    if (returns[i] && momentum[i] && acceleration[i] && week[i] && month[i] && velocity[i]) {
      frame.rows[i] = FeatureVector{*returns[i],     *momentum[i], *acceleration[i],
                                    *week[i],        *month[i],    *velocity[i]};
      if (frame.first_defined_index < 0) frame.first_defined_index = static_cast<std::ptrdiff_t>(i);
    }
  }
  return frame;
}

std::string format_cell(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

OptSeries compute_returns(const PriceSeries& series) {
  if (series.bars.empty()) throw DataError("compute_returns: empty series " + series.ticker);
  return ratio_minus_one(dense_closes(series), 1);
}

OptSeries compute_return_momentum(const OptSeries& returns) { return difference(returns); }

OptSeries compute_return_acceleration(const OptSeries& momentum) { return difference(momentum); }

OptSeries compute_week_price_momentum(const PriceSeries& series) {
  if (series.bars.empty()) {
    throw DataError("compute_week_price_momentum: empty series " + series.ticker);
  }
  return ratio_minus_one(dense_closes(series), kWeekLookback);
}

OptSeries compute_month_price_momentum(const PriceSeries& series) {
  if (series.bars.empty()) {
    throw DataError("compute_month_price_momentum: empty series " + series.ticker);
  }
  return ratio_minus_one(dense_closes(series), kMonthLookback);
}

OptSeries compute_volume_velocity(const PriceSeries& series) {
  if (series.bars.empty()) {
    throw DataError("compute_volume_velocity: empty series " + series.ticker);
  }
  OptSeries volumes(series.bars.size());
  for (std::size_t i = 0; i < series.bars.size(); ++i) {
    volumes[i] = static_cast<double>(series.bars[i].volume);
  }
  return volume_velocity_kernel(volumes);
}

OptSeries aligned_closes(const PriceSeries& series, const std::vector<Date>& calendar) {
  OptSeries closes(calendar.size());
  std::size_t ci = 0;
  for (const Bar& bar : series.bars) {
    while (ci < calendar.size() && calendar[ci] < bar.date) ++ci;
    if (ci >= calendar.size() || calendar[ci] != bar.date) {
      throw DataError("aligned_closes: series " + series.ticker + " date " + bar.date.to_string() +
                      " not in calendar");
    }
    closes[ci] = bar.close;
    ++ci;
  }
  return closes;
}

OptSeries returns_from_closes(const OptSeries& closes) { return ratio_minus_one(closes, 1); }

FeatureFrame build_feature_frame(const PriceSeries& series) {
  if (series.bars.empty()) throw DataError("build_feature_frame: empty series " + series.ticker);
  std::vector<Date> dates;
  dates.reserve(series.bars.size());
  for (const Bar& b : series.bars) dates.push_back(b.date);
  OptSeries closes = dense_closes(series);
  OptSeries volumes(series.bars.size());
  for (std::size_t i = 0; i < series.bars.size(); ++i) {
    volumes[i] = static_cast<double>(series.bars[i].volume);
  }
  return assemble_frame(series.ticker, std::move(dates), closes, volumes);
}

FeatureFrame build_feature_frame(const PriceSeries& series, const std::vector<Date>& calendar) {
  if (series.bars.empty()) throw DataError("build_feature_frame: empty series " + series.ticker);
  OptSeries closes(calendar.size());
  OptSeries volumes(calendar.size());
  std::size_t ci = 0;
  for (const Bar& bar : series.bars) {
    while (ci < calendar.size() && calendar[ci] < bar.date) ++ci;
    if (ci >= calendar.size() || calendar[ci] != bar.date) {
      throw DataError("build_feature_frame: series " + series.ticker + " date " +
                      bar.date.to_string() + " not in calendar");
    }
    closes[ci] = bar.close;
    volumes[ci] = static_cast<double>(bar.volume);
    ++ci;
  }
  return assemble_frame(series.ticker, calendar, closes, volumes);
}

std::string serialize_feature_csv(const FeatureFrame& frame) {
  std::string out = "date";
  for (const char* name : kFeatureNames) {
    out.push_back(',');
    out += name;
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < frame.rows.size(); ++i) {
    out += frame.dates[i].to_string();
    if (frame.rows[i]) {
      for (double v : frame.rows[i]->to_array()) {
        out.push_back(',');
        out += format_cell(v);
      }
    } else {
      for (int f = 0; f < kFeatureCount; ++f) out.push_back(',');
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace momo
