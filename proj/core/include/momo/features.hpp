#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "momo/market_data.hpp"

namespace momo {

inline constexpr int kFeatureCount = 6;
inline constexpr int kWeekLookback = 5;    // trading days
inline constexpr int kMonthLookback = 20;  // trading days
inline constexpr int kFeatureWarmup = 20;  // longest lookback of any feature

/// Column order is fixed; the model consumes vectors positionally.
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "ret",
    "ret_momentum",
    "ret_acceleration",
    "week_price_momentum",
    "month_price_momentum",
    "volume_velocity",
};

struct FeatureVector {
  double ret = 0.0;
  double ret_momentum = 0.0;
  double ret_acceleration = 0.0;
  double week_price_momentum = 0.0;
  double month_price_momentum = 0.0;
  double volume_velocity = 0.0;

  std::array<double, kFeatureCount> to_array() const {
    return {ret, ret_momentum, ret_acceleration, week_price_momentum, month_price_momentum,
            volume_velocity};
  }
};

/// Per-date feature rows for one ticker. A row is defined only when every
/// source value referenced by each feature's formula is present, which for a
/// gap-free series means from index 20 on.
struct FeatureFrame {
  std::string ticker;
  std::vector<Date> dates;
  std::vector<std::optional<FeatureVector>> rows;
  /// Index of the first defined row, or -1 when no row is defined.
  std::ptrdiff_t first_defined_index = -1;
};

using OptSeries = std::vector<std::optional<double>>;

/// r_i = C_i / C_{i-1} - 1; undefined at i = 0.
OptSeries compute_returns(const PriceSeries& series);

/// m_i = r_i - r_{i-1}; undefined where either return is.
OptSeries compute_return_momentum(const OptSeries& returns);

/// a_i = m_i - m_{i-1}; undefined where either momentum is.
OptSeries compute_return_acceleration(const OptSeries& momentum);

/// wpm_i = C_i / C_{i-5} - 1.
OptSeries compute_week_price_momentum(const PriceSeries& series);

/// mpm_i = C_i / C_{i-20} - 1.
OptSeries compute_month_price_momentum(const PriceSeries& series);

/// vv_i = V_i / V_{i-1} - 1; undefined at i = 0 and wherever V_{i-1} = 0.
OptSeries compute_volume_velocity(const PriceSeries& series);

/// Closes of `series` positioned on `calendar`; dates the series lacks stay empty.
/// Throws DataError if the series has a date outside the calendar.
OptSeries aligned_closes(const PriceSeries& series, const std::vector<Date>& calendar);

/// r_i = C_i / C_{i-1} - 1 over an optional close series (gap-aware).
OptSeries returns_from_closes(const OptSeries& closes);

/// Assemble the six features over the series' own dates.
FeatureFrame build_feature_frame(const PriceSeries& series);

/// Assemble the six features over an external trading calendar; calendar
/// dates the series does not cover become gaps that undefine every feature
/// whose formula references them. Throws DataError if the series has a date
/// outside the calendar.
FeatureFrame build_feature_frame(const PriceSeries& series, const std::vector<Date>& calendar);

/// CSV dump: header `date,<feature names>`, blank cells for undefined entries.
std::string serialize_feature_csv(const FeatureFrame& frame);

}  // namespace momo
