#include "ira/time_util.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "ira/error.hpp"

namespace ira {

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw ParseError("timestamp too short: '" + std::string(text) + "'");
  int v = 0;
  const char* first = text.data() + pos;
  const auto res = std::from_chars(first, first + len, v);
  if (res.ec != std::errc{} || res.ptr != first + len) throw ParseError("malformed timestamp: '" + std::string(text) + "'");
  return v;
}

void expect(std::string_view text, std::size_t pos, std::string_view allowed) {
  if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos) {
    throw ParseError("malformed timestamp: '" + std::string(text) + "'");
  }
}

}  // namespace

std::int64_t parse_utc(std::string_view text) {
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  const int year = read_int(text, 0, 4);
  expect(text, 4, "-");
  const int month = read_int(text, 5, 2);
  expect(text, 7, "-");
  const int day = read_int(text, 8, 2);
  expect(text, 10, "T ");
  const int hour = read_int(text, 11, 2);
  expect(text, 13, ":");
  const int minute = read_int(text, 14, 2);
  int second = 0;
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    second = read_int(text, 17, 2);
    pos = 19;
  }
  const std::string_view zone = text.substr(pos);
  if (!(zone.empty() || zone == "Z" || zone == "+00:00" || zone == "+0000")) {
    throw ParseError("non-UTC timestamp: '" + std::string(text) + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59 || hour < 0 || minute < 0 || second < 0) {
    throw ParseError("invalid calendar time: '" + std::string(text) + "'");
  }
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_utc(std::int64_t epoch_seconds) {
  const std::int64_t day0 = floor_day(epoch_seconds);
  const std::int64_t rem = epoch_seconds - day0;
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{day0 / 86400}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>((rem % 3600) / 60), static_cast<int>(rem % 60));
  return buf;
}

std::string format_utc_date(std::int64_t epoch_seconds) { return format_utc(epoch_seconds).substr(0, 10); }

}  // namespace ira
