#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ira {

/// Hourly demo dataset: grid A cheaper than grid B on average, interconnector mostly
/// saturated in the A->B direction. Used by tests, benchmarks and the `synth` command.
struct SyntheticDataset {
  std::vector<std::string> timestamps;  // ISO-8601 UTC
  std::vector<double> price_a;          // EUR/MWh
  std::vector<double> price_b;          // EUR/MWh
  std::vector<double> flow;             // MW, positive A->B
  std::vector<double> demand_a;         // MW
  std::vector<double> demand_b;         // MW
  std::vector<double> wind;             // MW available at the island

  std::size_t size() const { return price_a.size(); }
};

struct SyntheticOptions {
  std::size_t days = 7;
  std::uint64_t seed = 2019;
  double mean_price_a = 38.0;
  double skew = 6.0;          // mean B - A spread
  double daily_swing = 14.0;  // peak-to-mean amplitude
  double noise = 2.0;
  double line_limit = 1000.0;
  /// Share of hours with the line saturated toward grid B.
  double saturated_share = 0.85;
  double wind_rating = 1400.0;
  std::string start_date = "2019-01-07";
};

SyntheticDataset make_synthetic(const SyntheticOptions& options = {});

}  // namespace ira
