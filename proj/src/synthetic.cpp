#include "ira/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ira/error.hpp"
#include "ira/time_util.hpp"

namespace ira {

SyntheticDataset make_synthetic(const SyntheticOptions& o) {
  if (o.days == 0) throw ParameterError("make_synthetic: days must be positive");
  const std::int64_t start = parse_utc(o.start_date + "T00:00:00Z");
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SyntheticDataset d;
  const std::size_t hours = 24 * o.days;
  double wind_state = 0.5;
  for (std::size_t k = 0; k < hours; ++k) {
    const double hour = static_cast<double>(k % 24);
    // Morning and evening peaks, night trough.
    const double shape = 0.6 * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0) +
                         0.4 * std::sin(4.0 * std::numbers::pi * (hour - 4.0) / 24.0);
    const double a = o.mean_price_a + o.daily_swing * shape + o.noise * noise(rng);
    const double b = a + o.skew + 0.5 * o.daily_swing * shape + o.noise * noise(rng);
    d.timestamps.push_back(format_utc(start + static_cast<std::int64_t>(k) * 3600));
    d.price_a.push_back(std::max(0.0, a));
    d.price_b.push_back(std::max(0.0, b));
    const bool saturated = unit(rng) < o.saturated_share;
    d.flow.push_back(saturated ? o.line_limit : o.line_limit * (0.2 + 0.7 * unit(rng)) * (b >= a ? 1.0 : -1.0));
    d.demand_a.push_back(9000.0 + 1500.0 * shape + 200.0 * noise(rng));
    d.demand_b.push_back(30000.0 + 6000.0 * shape + 500.0 * noise(rng));
    wind_state = std::clamp(wind_state + 0.08 * noise(rng), 0.0, 1.0);
    d.wind.push_back(o.wind_rating * wind_state);
  }
  return d;
}

}  // namespace ira
