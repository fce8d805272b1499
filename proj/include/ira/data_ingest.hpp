#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ira {

enum class Unit { EurPerMwh, GbpPerMwh, MW, MWh };

/// Accepts `EUR/MWh`, `GBP/MWh`, `MW`, `MWh` (case-insensitive). Throws SchemaError.
Unit parse_unit(std::string_view text);
std::string to_string(Unit unit);
inline bool is_price(Unit u) { return u == Unit::EurPerMwh || u == Unit::GbpPerMwh; }

/// EUR per GBP.
constexpr double kGbpToEur = 1.16;
constexpr std::int64_t kHour = 3600;
constexpr std::int64_t kDay = 86400;

struct SeriesSchema {
  std::string name;
  Unit unit = Unit::EurPerMwh;
  std::string timestamp_column = "timestamp";
  std::string value_column = "value";
};

/// Hourly series on a gap-free grid; absent rows and empty cells are both `nullopt`.
struct RawSeries {
  std::string name;
  Unit unit = Unit::EurPerMwh;
  std::vector<std::int64_t> timestamps;  // UTC epoch seconds, strictly hourly
  std::vector<std::optional<double>> values;

  std::size_t size() const { return values.size(); }
  std::size_t missing_count() const;
};

/// Reads a CSV with a header row. Timestamps must increase; gaps that are whole hours are
/// filled with missing markers. Throws ParseError, OrderingError, SchemaError.
RawSeries load_series(const std::filesystem::path& path, const SeriesSchema& schema);
RawSeries parse_series(std::istream& in, const SeriesSchema& schema, const std::string& source = "<stream>");

enum class HourFlag : std::uint8_t { Observed, Interpolated, Clamped };

std::string to_string(HourFlag flag);

/// Whole UTC days, 24 values per retained day.
struct CleanSeries {
  std::string name;
  Unit unit = Unit::EurPerMwh;
  std::vector<std::int64_t> days;  // epoch seconds at 00:00 UTC
  std::vector<double> values;
  std::vector<HourFlag> flags;

  std::size_t size() const { return values.size(); }
  std::int64_t timestamp(std::size_t hour) const { return days[hour / 24] + static_cast<std::int64_t>(hour % 24) * kHour; }
  std::vector<std::int64_t> timestamps() const;
};

struct CleaningReport {
  std::string name;
  std::size_t input_hours = 0;
  std::size_t missing_hours = 0;
  std::size_t retained_days = 0;
  std::size_t dropped_days = 0;
  std::size_t interpolated_hours = 0;
  std::size_t clamped_hours = 0;
  std::vector<std::string> warnings;

  std::string to_json() const;
};

/// Drops every UTC day touched by a run of two or more missing hours (runs may cross
/// midnight) and every day whose single gap has no observed neighbour on one side.
/// Remaining single gaps get the mean of the neighbouring hours. Hours outside the input
/// range count as missing.
CleanSeries clean_series(const RawSeries& raw, CleaningReport* report = nullptr);

/// Back to the raw representation (all values present).
RawSeries to_raw(const CleanSeries& series);

/// Negative prices become 0 and are flagged. Throws UnitError for non-price units.
CleanSeries clamp_negative_prices(const CleanSeries& series, std::size_t* clamped_count = nullptr);

/// GBP/MWh to EUR/MWh. Throws UnitError unless the unit is GBP/MWh, ParameterError unless factor > 0.
CleanSeries convert_currency(const CleanSeries& series, double factor = kGbpToEur);

/// Keeps only the days present in every series.
std::vector<CleanSeries> align_days(std::span<const CleanSeries> series);

/// `timestamp,value,flag`
void write_clean_csv(const std::filesystem::path& path, const CleanSeries& series, const std::string& header_comment = {});

/// Loads a cleaned CSV (as written above, flag column optional) straight into a CleanSeries.
/// Throws DataError if it does not cover whole days.
CleanSeries load_clean_series(const std::filesystem::path& path, const SeriesSchema& schema);

/// Prices for a study: load, clean, convert GBP if needed, clamp. Fills `report` when given.
CleanSeries ingest_price_series(const std::filesystem::path& path, const SeriesSchema& schema,
                                CleaningReport* report = nullptr);

}  // namespace ira
