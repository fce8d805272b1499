#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ira {

/// Seconds since the Unix epoch for `YYYY-MM-DDTHH:MM[:SS][Z|+00:00]` (a space may replace
/// the `T`). Only UTC offsets are accepted. Throws ParseError.
std::int64_t parse_utc(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_utc(std::int64_t epoch_seconds);

/// `YYYY-MM-DD`
std::string format_utc_date(std::int64_t epoch_seconds);

inline std::int64_t floor_day(std::int64_t epoch_seconds) {
  constexpr std::int64_t day = 86400;
  std::int64_t q = epoch_seconds / day;
  if (epoch_seconds % day < 0) --q;
  return q * day;
}

}  // namespace ira
