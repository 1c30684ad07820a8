#include "momo/calendar.hpp"

#include <array>
#include <cstdio>

#include "momo/errors.hpp"

namespace momo {
namespace {

// Civil-from-days and days-from-civil, exact over the int32 range we use.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Ymd {
  int y;
  unsigned m;
  unsigned d;
};

Ymd civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {static_cast<int>(y + (m <= 2)), m, d};
}

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[static_cast<std::size_t>(m - 1)];
}

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

Date Date::from_ymd(int year, int month, int day) {
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
    throw DataError("invalid calendar date: " + std::to_string(year) + "-" + std::to_string(month) +
                    "-" + std::to_string(day));
  }
  return from_serial(static_cast<std::int32_t>(
      days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day))));
}

bool Date::try_parse(std::string_view iso, Date& out) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return false;
  const auto ys = iso.substr(0, 4);
  const auto ms = iso.substr(5, 2);
  const auto ds = iso.substr(8, 2);
  if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return false;
  const int y = to_int(ys);
  const int m = to_int(ms);
  const int d = to_int(ds);
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return false;
  out = from_ymd(y, m, d);
  return true;
}

Date Date::parse(std::string_view iso) {
  Date d;
  if (!try_parse(iso, d)) {
    throw DataError("invalid ISO date '" + std::string(iso) + "' (expected YYYY-MM-DD)");
  }
  return d;
}

std::string Date::to_string() const {
  const Ymd ymd = civil_from_days(days_);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", ymd.y, ymd.m, ymd.d);
  return buf;
}

int Date::year() const { return civil_from_days(days_).y; }
int Date::month() const { return static_cast<int>(civil_from_days(days_).m); }
int Date::day() const { return static_cast<int>(civil_from_days(days_).d); }

int Date::weekday() const {
  // 1970-01-01 was a Thursday (index 3 with Monday = 0).
  std::int64_t w = (static_cast<std::int64_t>(days_) + 3) % 7;
  if (w < 0) w += 7;
  return static_cast<int>(w);
}

bool Date::is_weekend() const { return weekday() >= 5; }

Date Date::next_weekday() const {
  Date d = *this + 1;
  while (d.is_weekend()) d = d + 1;
  return d;
}

}  // namespace momo
