#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ira {

/// Interconnector utilization in percent: 100 * sum|flow| / (l_max * T).
double utilization_factor(std::span<const double> flow, double l_max);

/// Maps a cycle depth (fraction of capacity) to its equivalent-full-cycle weight.
using DepthWeight = std::function<double(double depth)>;

struct RainflowCycle {
  double range;  // MWh
  double count;  // 1 for closed cycles, 0.5 for residual half cycles
};

/// Rainflow extraction (three-point rule with residual half cycles) over the turning points.
std::vector<RainflowCycle> rainflow(std::span<const double> series);

/// Equivalent 100% depth-of-discharge cycles. Each cycle contributes count * weight(range / b_max);
/// the default weight is linear.
double count_cycles(std::span<const double> soc, double b_max, const DepthWeight& weight = {});

/// Years to recover `investment`; infinity when revenue <= 0.
double simple_payback(double investment, double annual_revenue);

/// Scales a horizon quantity to 365 days.
double annualize(double value, double days);

struct PaybackCycles {
  double cycles = std::numeric_limits<double>::infinity();
  bool viable = false;
};

/// annual_cycles * spp, viable when finite and within the cycle life.
PaybackCycles cycles_to_payback(double annual_cycles, double spp, double cycle_life);

struct Metrics {
  double days = 0.0;
  double revenue = 0.0;         // EUR over the horizon
  double annual_revenue = 0.0;  // EUR/yr
  double cycles = 0.0;          // over the horizon
  double annual_cycles = 0.0;
  double spp = std::numeric_limits<double>::infinity();  // years
  double cycles_to_payback = std::numeric_limits<double>::infinity();
  bool viable = false;
  /// Interconnector utilization of the study flows, NaN when there are none.
  double uf = std::numeric_limits<double>::quiet_NaN();
};

struct KneeSelection {
  double b_block = 0.0;
  std::size_t index = 0;
  /// Curve is a straight line: b_block is the smallest axis value.
  bool no_knee = false;
};

/// Point of maximum distance from the chord of the min-max normalized curve. Needs at least
/// three points and finite values; throws ParameterError otherwise.
KneeSelection select_blocking_m1(std::span<const double> b_block, std::span<const double> spp);

struct LifeSelection {
  double b_block = 0.0;
  /// SPP exceeds the calendar life even without blocking.
  bool not_viable = false;
  /// The curve re-enters the viable region after the first crossing.
  bool ambiguous = false;
};

/// Largest blocking level with SPP <= calendar life, interpolated linearly at the first crossing.
LifeSelection select_blocking_m2(std::span<const double> b_block, std::span<const double> spp, double calendar_life);

}  // namespace ira
