#include "ira/data_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include <json.hpp>

#include "ira/error.hpp"
#include "ira/io_util.hpp"
#include "ira/time_util.hpp"

namespace ira {

namespace {

// Longest gap filled with missing markers when loading (five years of hours).
constexpr std::int64_t kMaxGapHours = 5 * 366 * 24;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct CsvRow {
  std::int64_t timestamp;
  std::optional<double> value;
  std::string flag;
  std::size_t line;
};

std::vector<CsvRow> read_rows(std::istream& in, const SeriesSchema& schema, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::ptrdiff_t ts_col = -1, val_col = -1, flag_col = -1;
  std::size_t width = 0;
  bool have_header = false;
  std::vector<CsvRow> rows;
  auto where = [&]() { return source + ":" + std::to_string(line_no); };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto cells = split(view);
    if (!have_header) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        const std::string name = lower(cells[k]);
        if (name == lower(schema.timestamp_column)) ts_col = static_cast<std::ptrdiff_t>(k);
        if (name == lower(schema.value_column)) val_col = static_cast<std::ptrdiff_t>(k);
        if (name == "flag") flag_col = static_cast<std::ptrdiff_t>(k);
      }
      if (ts_col < 0 || val_col < 0) {
        throw SchemaError(where() + ": header must contain '" + schema.timestamp_column + "' and '" +
                          schema.value_column + "'");
      }
      width = cells.size();
      have_header = true;
      continue;
    }
    if (cells.size() != width) throw ParseError(where() + ": expected " + std::to_string(width) + " fields");
    CsvRow row;
    row.line = line_no;
    try {
      row.timestamp = parse_utc(cells[static_cast<std::size_t>(ts_col)]);
    } catch (const ParseError& e) {
      throw ParseError(where() + ": " + e.what());
    }
    const std::string_view cell = cells[static_cast<std::size_t>(val_col)];
    if (!cell.empty()) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError(where() + ": malformed value '" + std::string(cell) + "'");
      }
      row.value = v;
    }
    if (flag_col >= 0) row.flag = std::string(cells[static_cast<std::size_t>(flag_col)]);
    rows.push_back(std::move(row));
  }
  if (!have_header) throw SchemaError(source + ": missing header row");
  return rows;
}

HourFlag parse_flag(const std::string& s, const std::string& where) {
  if (s.empty() || s == "observed") return HourFlag::Observed;
  if (s == "interpolated") return HourFlag::Interpolated;
  if (s == "clamped") return HourFlag::Clamped;
  throw ParseError(where + ": unknown flag '" + s + "'");
}

std::string date_of(std::int64_t t) { return format_utc_date(t); }

}  // namespace

Unit parse_unit(std::string_view text) {
  const std::string u = lower(trim(text));
  if (u == "eur/mwh") return Unit::EurPerMwh;
  if (u == "gbp/mwh") return Unit::GbpPerMwh;
  if (u == "mw") return Unit::MW;
  if (u == "mwh") return Unit::MWh;
  throw SchemaError("unknown unit '" + std::string(text) + "'");
}

std::string to_string(Unit unit) {
  switch (unit) {
    case Unit::EurPerMwh: return "EUR/MWh";
    case Unit::GbpPerMwh: return "GBP/MWh";
    case Unit::MW: return "MW";
    case Unit::MWh: return "MWh";
  }
  return "?";
}

std::string to_string(HourFlag flag) {
  switch (flag) {
    case HourFlag::Observed: return "observed";
    case HourFlag::Interpolated: return "interpolated";
    case HourFlag::Clamped: return "clamped";
  }
  return "?";
}

std::size_t RawSeries::missing_count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](const auto& v) { return !v; }));
}

std::vector<std::int64_t> CleanSeries::timestamps() const {
  std::vector<std::int64_t> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = timestamp(i);
  return out;
}

RawSeries parse_series(std::istream& in, const SeriesSchema& schema, const std::string& source) {
  const auto rows = read_rows(in, schema, source);
  RawSeries raw;
  raw.name = schema.name;
  raw.unit = schema.unit;
  for (const auto& row : rows) {
    const std::string where = source + ":" + std::to_string(row.line);
    if (row.timestamp % kHour != 0) throw OrderingError(where + ": timestamp is not on the hour");
    if (!raw.timestamps.empty()) {
      const std::int64_t prev = raw.timestamps.back();
      if (row.timestamp == prev) throw OrderingError(where + ": duplicated timestamp " + format_utc(row.timestamp));
      if (row.timestamp < prev) throw OrderingError(where + ": timestamps must increase");
      const std::int64_t gap = (row.timestamp - prev) / kHour - 1;
      if (gap > kMaxGapHours) throw DataError(where + ": gap of more than five years");
      for (std::int64_t k = 1; k <= gap; ++k) {
        raw.timestamps.push_back(prev + k * kHour);
        raw.values.emplace_back(std::nullopt);
      }
    }
    raw.timestamps.push_back(row.timestamp);
    raw.values.push_back(row.value);
  }
  return raw;
}

RawSeries load_series(const std::filesystem::path& path, const SeriesSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_series(in, schema, path.string());
}

CleanSeries clean_series(const RawSeries& raw, CleaningReport* report) {
  CleaningReport rep;
  rep.name = raw.name;
  rep.input_hours = raw.size();
  rep.missing_hours = raw.missing_count();
  CleanSeries out;
  out.name = raw.name;
  out.unit = raw.unit;
  if (raw.size() == 0) {
    if (report != nullptr) *report = rep;
    return out;
  }
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (raw.timestamps[i] - raw.timestamps[i - 1] != kHour) throw OrderingError("clean_series: timestamps are not hourly");
  }

  // Whole-day grid covering the input; hours outside the input are missing.
  const std::int64_t first_day = floor_day(raw.timestamps.front());
  const std::int64_t last_day = floor_day(raw.timestamps.back());
  const std::size_t n_days = static_cast<std::size_t>((last_day - first_day) / kDay) + 1;
  const std::size_t n_hours = 24 * n_days;
  const std::size_t offset = static_cast<std::size_t>((raw.timestamps.front() - first_day) / kHour);
  std::vector<std::optional<double>> grid(n_hours);
  for (std::size_t i = 0; i < raw.size(); ++i) grid[offset + i] = raw.values[i];

  std::vector<bool> drop(n_days, false);
  std::vector<double> value(n_hours, 0.0);
  std::vector<HourFlag> flag(n_hours, HourFlag::Observed);
  for (std::size_t h = 0; h < n_hours; ++h) {
    if (grid[h]) value[h] = *grid[h];
  }
  std::size_t h = 0;
  while (h < n_hours) {
    if (grid[h]) {
      ++h;
      continue;
    }
    std::size_t end = h;
    while (end < n_hours && !grid[end]) ++end;
    const std::size_t run = end - h;
    if (run >= 2) {
      for (std::size_t k = h; k < end; ++k) drop[k / 24] = true;
    } else if (h == 0 || end == n_hours) {
      drop[h / 24] = true;
      rep.warnings.push_back("boundary gap at " + format_utc(first_day + static_cast<std::int64_t>(h) * kHour) +
                             " has no neighbour on one side; day " + date_of(first_day + static_cast<std::int64_t>(h / 24) * kDay) +
                             " dropped");
    } else {
      value[h] = 0.5 * (*grid[h - 1] + *grid[h + 1]);
      flag[h] = HourFlag::Interpolated;
    }
    h = end;
  }

  for (std::size_t d = 0; d < n_days; ++d) {
    if (drop[d]) {
      ++rep.dropped_days;
      continue;
    }
    out.days.push_back(first_day + static_cast<std::int64_t>(d) * kDay);
    for (std::size_t k = 24 * d; k < 24 * (d + 1); ++k) {
      out.values.push_back(value[k]);
      out.flags.push_back(flag[k]);
      if (flag[k] == HourFlag::Interpolated) ++rep.interpolated_hours;
    }
  }
  rep.retained_days = out.days.size();
  if (report != nullptr) *report = std::move(rep);
  return out;
}

RawSeries to_raw(const CleanSeries& series) {
  RawSeries raw;
  raw.name = series.name;
  raw.unit = series.unit;
  if (series.days.empty()) return raw;
  const std::int64_t start = series.days.front();
  const std::int64_t stop = series.days.back() + kDay;
  std::map<std::int64_t, std::size_t> day_pos;
  for (std::size_t d = 0; d < series.days.size(); ++d) day_pos[series.days[d]] = d;
  for (std::int64_t t = start; t < stop; t += kHour) {
    raw.timestamps.push_back(t);
    const auto it = day_pos.find(floor_day(t));
    if (it == day_pos.end()) {
      raw.values.emplace_back(std::nullopt);
    } else {
      raw.values.emplace_back(series.values[24 * it->second + static_cast<std::size_t>((t - it->first) / kHour)]);
    }
  }
  return raw;
}

CleanSeries clamp_negative_prices(const CleanSeries& series, std::size_t* clamped_count) {
  if (!is_price(series.unit)) throw UnitError("clamp_negative_prices: " + to_string(series.unit) + " is not a price unit");
  CleanSeries out = series;
  std::size_t count = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.values[i] < 0.0) {
      out.values[i] = 0.0;
      out.flags[i] = HourFlag::Clamped;
      ++count;
    }
  }
  if (clamped_count != nullptr) *clamped_count = count;
  return out;
}

CleanSeries convert_currency(const CleanSeries& series, double factor) {
  if (series.unit != Unit::GbpPerMwh) {
    throw UnitError("convert_currency: expected GBP/MWh, got " + to_string(series.unit));
  }
  if (!(factor > 0.0) || !std::isfinite(factor)) throw ParameterError("convert_currency: factor must be positive");
  CleanSeries out = series;
  for (double& v : out.values) v *= factor;
  out.unit = Unit::EurPerMwh;
  return out;
}

std::vector<CleanSeries> align_days(std::span<const CleanSeries> series) {
  if (series.empty()) return {};
  std::set<std::int64_t> common(series.front().days.begin(), series.front().days.end());
  for (const auto& s : series.subspan(1)) {
    const std::set<std::int64_t> other(s.days.begin(), s.days.end());
    std::set<std::int64_t> keep;
    std::set_intersection(common.begin(), common.end(), other.begin(), other.end(), std::inserter(keep, keep.end()));
    common = std::move(keep);
  }
  std::vector<CleanSeries> out;
  for (const auto& s : series) {
    CleanSeries a;
    a.name = s.name;
    a.unit = s.unit;
    for (std::size_t d = 0; d < s.days.size(); ++d) {
      if (!common.contains(s.days[d])) continue;
      a.days.push_back(s.days[d]);
      a.values.insert(a.values.end(), s.values.begin() + static_cast<std::ptrdiff_t>(24 * d),
                      s.values.begin() + static_cast<std::ptrdiff_t>(24 * (d + 1)));
      a.flags.insert(a.flags.end(), s.flags.begin() + static_cast<std::ptrdiff_t>(24 * d),
                     s.flags.begin() + static_cast<std::ptrdiff_t>(24 * (d + 1)));
    }
    out.push_back(std::move(a));
  }
  return out;
}

void write_clean_csv(const std::filesystem::path& path, const CleanSeries& series, const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw DataError("write_clean_csv: cannot open " + path.string());
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "timestamp,value,flag\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_utc(series.timestamp(i)) << ',' << format_double(series.values[i]) << ',' << to_string(series.flags[i])
        << '\n';
  }
  if (!out) throw DataError("write_clean_csv: write failed for " + path.string());
}

CleanSeries load_clean_series(const std::filesystem::path& path, const SeriesSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  const auto rows = read_rows(in, schema, path.string());
  CleanSeries out;
  out.name = schema.name;
  out.unit = schema.unit;
  std::int64_t expected = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string where = path.string() + ":" + std::to_string(row.line);
    if (!row.value) throw DataError(where + ": cleaned series has a missing value");
    if (i % 24 == 0) {
      if (row.timestamp != floor_day(row.timestamp)) throw DataError(where + ": day does not start at 00:00 UTC");
      if (!out.days.empty() && row.timestamp <= out.days.back()) throw OrderingError(where + ": days must increase");
      out.days.push_back(row.timestamp);
      expected = row.timestamp;
    } else if (row.timestamp != expected) {
      throw DataError(where + ": cleaned series must hold whole hourly days");
    }
    expected += kHour;
    out.values.push_back(*row.value);
    out.flags.push_back(parse_flag(row.flag, where));
  }
  if (out.values.size() % 24 != 0) throw DataError(path.string() + ": cleaned series must hold whole days");
  return out;
}

CleanSeries ingest_price_series(const std::filesystem::path& path, const SeriesSchema& schema, CleaningReport* report) {
  if (!is_price(schema.unit)) throw UnitError("ingest_price_series: " + to_string(schema.unit) + " is not a price unit");
  CleaningReport rep;
  CleanSeries s = clean_series(load_series(path, schema), &rep);
  if (s.unit == Unit::GbpPerMwh) s = convert_currency(s, kGbpToEur);
  s = clamp_negative_prices(s, &rep.clamped_hours);
  if (report != nullptr) *report = std::move(rep);
  return s;
}

std::string CleaningReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["input_hours"] = input_hours;
  j["missing_hours"] = missing_hours;
  j["retained_days"] = retained_days;
  j["dropped_days"] = dropped_days;
  j["interpolated_hours"] = interpolated_hours;
  j["clamped_hours"] = clamped_hours;
  j["warnings"] = warnings;
  return j.dump(2);
}

}  // namespace ira
