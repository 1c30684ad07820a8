#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace momo {

/// Civil calendar date stored as days since 1970-01-01. No time zone, no time of day.
class Date {
 public:
  Date() = default;

  /// Throws DataError on an impossible calendar date.
  static Date from_ymd(int year, int month, int day);

  /// Strict `YYYY-MM-DD`. Throws DataError on anything else.
  static Date parse(std::string_view iso);
  static bool try_parse(std::string_view iso, Date& out);

  static Date from_serial(std::int32_t days) {
    Date d;
    d.days_ = days;
    return d;
  }

  std::string to_string() const;  // YYYY-MM-DD

  int year() const;
  int month() const;
  int day() const;
  std::int32_t serial() const { return days_; }

  /// 0 = Monday .. 6 = Sunday.
  int weekday() const;
  bool is_weekend() const;

  /// Next calendar day that is not a Saturday or Sunday.
  Date next_weekday() const;

  Date operator+(int days) const { return from_serial(days_ + days); }
  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  std::int32_t days_ = 0;
};

}  // namespace momo
