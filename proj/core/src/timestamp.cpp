// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/timestamp.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace cacaobpmn {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int yr = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = yr + (m <= 2);
}

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(int y, unsigned m) {
  static constexpr std::array<unsigned, 12> k = {31, 28, 31, 30, 31, 30,
                                                 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return k[m - 1];
}

int read_digits(std::string_view s, std::size_t pos, std::size_t n) {
  int value = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const char c = pos + i < s.size() ? s[pos + i] : '\0';
    if (c < '0' || c > '9') return -1;
    value = value * 10 + (c - '0');
  }
  return value;
}

[[noreturn]] void fail(std::string_view text) {
  throw std::invalid_argument("invalid RFC 3339 timestamp: " +
                              std::string(text));
}

}  // namespace

Timestamp Timestamp::parse(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS[.f+]Z
  if (text.size() < 20) fail(text);
  const int year = read_digits(text, 0, 4);
  const int month = read_digits(text, 5, 2);
  const int day = read_digits(text, 8, 2);
  const int hour = read_digits(text, 11, 2);
  const int minute = read_digits(text, 14, 2);
  const int second = read_digits(text, 17, 2);
  if (year < 0 || month < 0 || day < 0 || hour < 0 || minute < 0 ||
      second < 0)
    fail(text);
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != 't') ||
      text[13] != ':' || text[16] != ':')
    fail(text);
  if (month < 1 || month > 12 || day < 1 ||
      day > static_cast<int>(days_in_month(year, month)) || hour > 23 ||
      minute > 59 || second > 60)
    fail(text);

  std::size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    int scale = 100;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) millis += (text[pos] - '0') * scale;
      scale /= 10;
      ++digits;
      ++pos;
    }
    if (digits == 0) fail(text);
  }
  if (pos + 1 != text.size() || (text[pos] != 'Z' && text[pos] != 'z'))
    fail(text);

  const std::int64_t days = days_from_civil(year, month, day);
  const std::int64_t secs =
      days * 86400 + hour * 3600 + minute * 60 + (second == 60 ? 59 : second);
  return from_millis(secs * 1000 + millis);
}

std::string Timestamp::to_rfc3339() const {
  std::int64_t ms = millis_ % 1000;
  std::int64_t secs = millis_ / 1000;
  if (ms < 0) {
    ms += 1000;
    secs -= 1;
  }
  std::int64_t days = secs / 86400;
  std::int64_t sod = secs % 86400;
  if (sod < 0) {
    sod += 86400;
    days -= 1;
  }
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                y, m, d, static_cast<long long>(sod / 3600),
                static_cast<long long>((sod % 3600) / 60),
                static_cast<long long>(sod % 60), static_cast<long long>(ms));
  return buf;
}

}  // namespace cacaobpmn
