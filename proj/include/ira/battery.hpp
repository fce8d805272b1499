#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ira/envelope.hpp"

namespace ira {

/// Physical and economic description of the storage unit. Defaults are the reference
/// 1 MWh / 0.5 MW unit: 100 EUR/kWh, b_min 0.1 MWh, b0 0.5 MWh, 95% charge, discharge
/// and converter efficiency, 7200 full cycles, 10 calendar years.
struct BatteryParams {
  double b_min = 0.1;      // MWh
  double b_max = 1.0;      // MWh
  double b0 = 0.5;         // MWh
  double delta_min = -0.5; // MW
  double delta_max = 0.5;  // MW
  double eta_ch = 0.95;
  double eta_dis = 0.95;
  double eta_inv = 0.95;
  double h = 1.0;          // hours per step
  double cost_per_kwh = 100.0;
  double cycle_life_100dod = 7200.0;
  double calendar_life = 10.0;  // years

  double x_min() const { return delta_min * h; }
  double x_max() const { return delta_max * h; }
  double ramp_limit() const;
  double investment() const { return cost_per_kwh * b_max * 1000.0; }

  void validate() const;
};

struct EffectiveEfficiencies {
  double eta_ch_star;
  double eta_dis_star;
};

/// Battery efficiencies seen through the inverter.
EffectiveEfficiencies effective_efficiencies(const BatteryParams& p);

struct AdjustedPrices {
  std::vector<double> buy;
  std::vector<double> sell;
};

/// Grid-B prices as seen from the battery in grid A: buy (p + rent) / eta_line, sell (p - rent) * eta_line.
AdjustedPrices adjust_prices(std::span<const double> p_buy_b, std::span<const double> p_sell_b,
                             std::span<const double> rent, double eta_line);

/// Buy/sell prices for both grids plus the adjusted grid-B pair, all EUR/MWh per step.
struct PriceSet {
  std::vector<double> buy_a;
  std::vector<double> sell_a;
  std::vector<double> buy_b;
  std::vector<double> sell_b;
  std::vector<double> buy_b_adj;
  std::vector<double> sell_b_adj;
  std::vector<double> rent;
  double eta_line = 1.0;

  std::size_t size() const { return buy_a.size(); }

  /// Builds the set and fills the adjusted series. Throws ShapeError on length mismatch.
  static PriceSet make(std::vector<double> buy_a, std::vector<double> sell_a, std::vector<double> buy_b,
                       std::vector<double> sell_b, std::vector<double> rent, double eta_line);
  /// Day-ahead style: one clearing price per zone used for both buying and selling, uniform rent.
  static PriceSet from_clearing(std::span<const double> price_a, std::span<const double> price_b, double rent,
                                double eta_line);
};

/// b_i = b_{i-1} + x_i starting from b0.
std::vector<double> simulate_soc(const BatteryParams& p, std::span<const double> x);

enum class ViolationKind { RampA, EnvelopeB, JointRamp, Capacity, SimultaneousChargeDischarge };

std::string to_string(ViolationKind kind);

struct Violation {
  std::size_t step;
  ViolationKind kind;
  double amount;  // magnitude beyond the limit
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
};

constexpr double kFeasibilityTol = 1e-6;

/// Checks ramp limits, the grid-B envelope, the joint ramp, the SoC band [b_lo, b_hi] and the
/// same-sign rule x_a * x_b >= 0 at every step; returns every violation found.
FeasibilityReport check_feasible(const BatteryParams& p, std::span<const double> x_a, std::span<const double> x_b,
                                 const OperatingEnvelope& envelope, double b_lo, double b_hi,
                                 double tol = kFeasibilityTol);

enum class EfficiencyMode { Raw, Inverter };

/// Grid-side power for a battery-side energy change x: max(0,x)/(h eta_ch) - eta_dis max(0,-x)/h.
double grid_power(const BatteryParams& p, double x, EfficiencyMode mode = EfficiencyMode::Raw);
std::vector<double> grid_power(const BatteryParams& p, std::span<const double> x,
                               EfficiencyMode mode = EfficiencyMode::Raw);

}  // namespace ira
