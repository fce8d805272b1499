#include "ira/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ira/error.hpp"

namespace ira {

namespace {

void require_axis(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
  if (x.size() != y.size()) throw ShapeError("blocking selection: axis and SPP differ in length");
  if (x.size() < min_points) throw ParameterError("blocking selection: too few sweep points");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw ParameterError("blocking selection: axis must be strictly increasing");
  }
}

// Turning points with plateaus collapsed.
std::vector<double> turning_points(std::span<const double> s) {
  std::vector<double> out;
  for (double v : s) {
    if (!out.empty() && v == out.back()) continue;
    if (out.size() >= 2 && (out.back() - out[out.size() - 2]) * (v - out.back()) > 0.0) {
      out.back() = v;
      continue;
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

double utilization_factor(std::span<const double> flow, double l_max) {
  if (flow.empty()) throw DataError("utilization_factor: empty flow series");
  if (!(l_max > 0.0)) throw ParameterError("utilization_factor: line limit must be positive");
  double total = 0.0;
  for (double f : flow) total += std::abs(f);
  return 100.0 * total / (l_max * static_cast<double>(flow.size()));
}

std::vector<RainflowCycle> rainflow(std::span<const double> series) {
  std::vector<RainflowCycle> cycles;
  std::vector<double> stack;
  for (double p : turning_points(series)) {
    stack.push_back(p);
    while (stack.size() >= 3) {
      const std::size_t n = stack.size();
      const double x = std::abs(stack[n - 1] - stack[n - 2]);
      const double y = std::abs(stack[n - 2] - stack[n - 3]);
      if (x < y) break;
      if (n == 3) {
        cycles.push_back({y, 0.5});
        stack.erase(stack.begin());
      } else {
        cycles.push_back({y, 1.0});
        stack.erase(stack.end() - 3, stack.end() - 1);
      }
    }
  }
  for (std::size_t i = 1; i < stack.size(); ++i) cycles.push_back({std::abs(stack[i] - stack[i - 1]), 0.5});
  return cycles;
}

double count_cycles(std::span<const double> soc, double b_max, const DepthWeight& weight) {
  if (!(b_max > 0.0)) throw ParameterError("count_cycles: b_max must be positive");
  double total = 0.0;
  for (const auto& c : rainflow(soc)) {
    const double depth = c.range / b_max;
    total += c.count * (weight ? weight(depth) : depth);
  }
  return total;
}

double simple_payback(double investment, double annual_revenue) {
  if (!(investment > 0.0)) throw ParameterError("simple_payback: investment must be positive");
  if (!(annual_revenue > 0.0)) return std::numeric_limits<double>::infinity();
  return investment / annual_revenue;
}

double annualize(double value, double days) {
  if (!(days > 0.0)) throw ParameterError("annualize: horizon must cover a positive number of days");
  return value * 365.0 / days;
}

PaybackCycles cycles_to_payback(double annual_cycles, double spp, double cycle_life) {
  PaybackCycles p;
  if (!std::isfinite(spp)) return p;
  p.cycles = annual_cycles * spp;
  p.viable = p.cycles <= cycle_life;
  return p;
}

KneeSelection select_blocking_m1(std::span<const double> b_block, std::span<const double> spp) {
  require_axis(b_block, spp, 3);
  for (double v : spp) {
    if (!std::isfinite(v)) throw ParameterError("select_blocking_m1: SPP must be finite on the whole curve");
  }
  const auto [ylo, yhi] = std::minmax_element(spp.begin(), spp.end());
  const double x0 = b_block.front(), xs = b_block.back() - b_block.front();
  const double y0 = *ylo, ys = *yhi - *ylo;
  KneeSelection k;
  k.b_block = b_block.front();
  if (ys <= 0.0) {
    k.no_knee = true;
    return k;
  }
  auto nx = [&](std::size_t i) { return (b_block[i] - x0) / xs; };
  auto ny = [&](std::size_t i) { return (spp[i] - y0) / ys; };
  const std::size_t last = spp.size() - 1;
  const double dx = nx(last) - nx(0), dy = ny(last) - ny(0);
  const double len = std::hypot(dx, dy);
  double best = 0.0;
  for (std::size_t i = 1; i < last; ++i) {
    const double d = std::abs(dy * (nx(i) - nx(0)) - dx * (ny(i) - ny(0))) / len;
    if (d > best + 1e-12) {
      best = d;
      k.index = i;
    }
  }
  if (best <= 1e-9) {
    k.no_knee = true;
    k.index = 0;
    return k;
  }
  k.b_block = b_block[k.index];
  return k;
}

LifeSelection select_blocking_m2(std::span<const double> b_block, std::span<const double> spp, double calendar_life) {
  require_axis(b_block, spp, 1);
  LifeSelection s;
  if (!(spp.front() <= calendar_life)) {
    s.not_viable = true;
    return s;
  }
  std::size_t k = 1;
  while (k < spp.size() && spp[k] <= calendar_life) ++k;
  if (k == spp.size()) {
    s.b_block = b_block.back();
    return s;
  }
  const double x0 = b_block[k - 1], x1 = b_block[k];
  const double y0 = spp[k - 1], y1 = spp[k];
  s.b_block = std::isfinite(y1) ? x0 + (calendar_life - y0) * (x1 - x0) / (y1 - y0) : x0;
  for (std::size_t j = k + 1; j < spp.size(); ++j) {
    if (spp[j] <= calendar_life) s.ambiguous = true;
  }
  return s;
}

}  // namespace ira
