#include "ira/battery.hpp"

#include <algorithm>
#include <cmath>

#include "ira/error.hpp"

namespace ira {

namespace {

bool in_unit_interval(double v) { return v > 0.0 && v <= 1.0; }

}  // namespace

double BatteryParams::ramp_limit() const { return std::max(-x_min(), x_max()); }

void BatteryParams::validate() const {
  if (!(b_min < b_max)) throw ParameterError("BatteryParams: b_min must be below b_max");
  if (!(b_min <= b0 && b0 <= b_max)) throw ParameterError("BatteryParams: b0 must lie in [b_min, b_max]");
  if (!(h > 0.0)) throw ParameterError("BatteryParams: sampling period must be positive");
  if (!(delta_min < 0.0 && 0.0 < delta_max)) throw ParameterError("BatteryParams: need delta_min < 0 < delta_max");
  if (!in_unit_interval(eta_ch) || !in_unit_interval(eta_dis) || !in_unit_interval(eta_inv)) {
    throw ParameterError("BatteryParams: efficiencies must lie in (0, 1]");
  }
  if (!(cost_per_kwh >= 0.0)) throw ParameterError("BatteryParams: cost must be nonnegative");
}

EffectiveEfficiencies effective_efficiencies(const BatteryParams& p) {
  return {p.eta_ch * p.eta_inv, p.eta_dis * p.eta_inv};
}

AdjustedPrices adjust_prices(std::span<const double> p_buy_b, std::span<const double> p_sell_b,
                             std::span<const double> rent, double eta_line) {
  if (!(eta_line > 0.0 && eta_line <= 1.0)) throw ParameterError("adjust_prices: eta_line must lie in (0, 1]");
  if (p_buy_b.size() != p_sell_b.size() || rent.size() != p_buy_b.size()) {
    throw ShapeError("adjust_prices: series differ in length");
  }
  AdjustedPrices out;
  out.buy.resize(p_buy_b.size());
  out.sell.resize(p_buy_b.size());
  for (std::size_t i = 0; i < p_buy_b.size(); ++i) {
    if (rent[i] < 0.0) throw ParameterError("adjust_prices: rent must be nonnegative");
    out.buy[i] = (p_buy_b[i] + rent[i]) / eta_line;
    out.sell[i] = (p_sell_b[i] - rent[i]) * eta_line;
  }
  return out;
}

PriceSet PriceSet::make(std::vector<double> buy_a, std::vector<double> sell_a, std::vector<double> buy_b,
                        std::vector<double> sell_b, std::vector<double> rent, double eta_line) {
  const std::size_t n = buy_a.size();
  if (sell_a.size() != n || buy_b.size() != n || sell_b.size() != n || rent.size() != n) {
    throw ShapeError("PriceSet: price and rent series must share one horizon");
  }
  PriceSet ps;
  auto adj = adjust_prices(buy_b, sell_b, rent, eta_line);
  ps.buy_a = std::move(buy_a);
  ps.sell_a = std::move(sell_a);
  ps.buy_b = std::move(buy_b);
  ps.sell_b = std::move(sell_b);
  ps.buy_b_adj = std::move(adj.buy);
  ps.sell_b_adj = std::move(adj.sell);
  ps.rent = std::move(rent);
  ps.eta_line = eta_line;
  return ps;
}

PriceSet PriceSet::from_clearing(std::span<const double> price_a, std::span<const double> price_b, double rent,
                                 double eta_line) {
  if (price_a.size() != price_b.size()) throw ShapeError("PriceSet::from_clearing: zone series differ in length");
  std::vector<double> a(price_a.begin(), price_a.end());
  std::vector<double> b(price_b.begin(), price_b.end());
  return make(a, a, b, b, std::vector<double>(a.size(), rent), eta_line);
}

std::vector<double> simulate_soc(const BatteryParams& p, std::span<const double> x) {
  std::vector<double> soc(x.size());
  double b = p.b0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    b += x[i];
    soc[i] = b;
  }
  return soc;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::RampA: return "ramp_a";
    case ViolationKind::EnvelopeB: return "envelope_b";
    case ViolationKind::JointRamp: return "joint_ramp";
    case ViolationKind::Capacity: return "capacity";
    case ViolationKind::SimultaneousChargeDischarge: return "simultaneous_charge_discharge";
  }
  return "unknown";
}

FeasibilityReport check_feasible(const BatteryParams& p, std::span<const double> x_a, std::span<const double> x_b,
                                 const OperatingEnvelope& envelope, double b_lo, double b_hi, double tol) {
  if (x_a.size() != x_b.size() || envelope.size() != x_a.size()) {
    throw ShapeError("check_feasible: trajectories and envelope must share one horizon");
  }
  FeasibilityReport rep;
  auto excess = [&](double v, double lo, double hi) { return std::max(lo - v, v - hi); };
  const double xmin = p.x_min();
  const double xmax = p.x_max();
  double b = p.b0;
  for (std::size_t i = 0; i < x_a.size(); ++i) {
    if (const double e = excess(x_a[i], xmin, xmax); e > tol) rep.violations.push_back({i, ViolationKind::RampA, e});
    if (const double e = excess(x_b[i], envelope.x_min_adj[i], envelope.x_max_adj[i]); e > tol) {
      rep.violations.push_back({i, ViolationKind::EnvelopeB, e});
    }
    if (const double e = excess(x_a[i] + x_b[i], xmin, xmax); e > tol) {
      rep.violations.push_back({i, ViolationKind::JointRamp, e});
    }
    b += x_a[i] + x_b[i];
    if (const double e = excess(b, b_lo, b_hi); e > tol) rep.violations.push_back({i, ViolationKind::Capacity, e});
    const bool opposite = (x_a[i] > tol && x_b[i] < -tol) || (x_a[i] < -tol && x_b[i] > tol);
    if (opposite) {
      rep.violations.push_back({i, ViolationKind::SimultaneousChargeDischarge, std::min(std::abs(x_a[i]), std::abs(x_b[i]))});
    }
  }
  return rep;
}

double grid_power(const BatteryParams& p, double x, EfficiencyMode mode) {
  double ch = p.eta_ch;
  double dis = p.eta_dis;
  if (mode == EfficiencyMode::Inverter) {
    const auto eff = effective_efficiencies(p);
    ch = eff.eta_ch_star;
    dis = eff.eta_dis_star;
  }
  return std::max(0.0, x) / (p.h * ch) - dis * std::max(0.0, -x) / p.h;
}

std::vector<double> grid_power(const BatteryParams& p, std::span<const double> x, EfficiencyMode mode) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return grid_power(p, v, mode); });
  return out;
}

}  // namespace ira
