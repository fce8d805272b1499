#include "ira/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ira/error.hpp"
#include "ira/io_util.hpp"
#include "ira/solver/simplex.hpp"

namespace ira {

namespace {

constexpr double kBoundTol = 1e-9;

struct HourSolution {
  std::vector<double> generation;
  std::vector<double> flows;
  std::array<double, kNodeCount> prices{};
  double cost = 0.0;
  bool tied = false;
  bool infeasible = false;
  double balance_residual = 0.0;
  double complementarity = 0.0;
  double dual_infeasibility = 0.0;
};

void require_nonnegative(std::span<const double> v, const std::string& what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0) throw DataError(what + " is negative or non-finite at hour " + std::to_string(i));
  }
}

// Columns: generators then lines. Rows: nodal balance, generation - outflow + inflow = demand.
HourSolution solve_hour(const DispatchCase& c, std::size_t hour) {
  const std::size_t ng = c.generators.size();
  const std::size_t nl = c.lines.size();
  solver::MilpProblem lp;
  std::vector<solver::Triplet> t;
  lp.objective.assign(ng + nl, 0.0);
  lp.lower.assign(ng + nl, 0.0);
  lp.upper.assign(ng + nl, 0.0);
  for (std::size_t g = 0; g < ng; ++g) {
    const auto& gen = c.generators[g];
    t.push_back({static_cast<std::size_t>(gen.node), g, 1.0});
    lp.objective[g] = gen.price[hour];
    lp.upper[g] = gen.capacity[hour];
  }
  for (std::size_t l = 0; l < nl; ++l) {
    const auto& line = c.lines[l];
    t.push_back({static_cast<std::size_t>(line.from), ng + l, -1.0});
    t.push_back({static_cast<std::size_t>(line.to), ng + l, 1.0});
    lp.lower[ng + l] = -line.capacity;
    lp.upper[ng + l] = line.capacity;
  }
  lp.constraints = solver::SparseMatrix::from_triplets(kNodeCount, ng + nl, std::move(t));
  lp.rhs.resize(kNodeCount);
  for (std::size_t n = 0; n < kNodeCount; ++n) lp.rhs[n] = c.demand[n][hour];
  lp.sense.assign(kNodeCount, solver::RowSense::Equal);

  const auto r = solver::solve_lp(lp);
  HourSolution s;
  if (r.status == solver::LpStatus::Infeasible) {
    s.infeasible = true;
    return s;
  }
  if (r.status != solver::LpStatus::Optimal) {
    throw NumericError("clear_market: dispatch LP at hour " + std::to_string(hour) + " ended with status " +
                       solver::to_string(r.status));
  }
  s.generation.assign(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(ng));
  s.flows.assign(r.x.begin() + static_cast<std::ptrdiff_t>(ng), r.x.end());
  for (std::size_t n = 0; n < kNodeCount; ++n) s.prices[n] = r.duals[n];
  s.cost = r.objective;

  const auto ax = lp.constraints.multiply(r.x);
  for (std::size_t n = 0; n < kNodeCount; ++n) s.balance_residual = std::max(s.balance_residual, std::abs(ax[n] - lp.rhs[n]));
  for (std::size_t j = 0; j < ng + nl; ++j) {
    const double d = r.reduced_costs[j];
    const double lo_gap = r.x[j] - lp.lower[j];
    const double up_gap = lp.upper[j] - r.x[j];
    s.complementarity = std::max(s.complementarity, std::abs(d) * std::max(0.0, std::min(lo_gap, up_gap)));
    if (lp.lower[j] < lp.upper[j]) {
      if (lo_gap > kBoundTol && d > 0.0) s.dual_infeasibility = std::max(s.dual_infeasibility, d * std::min(1.0, lo_gap));
      if (up_gap > kBoundTol && d < 0.0) s.dual_infeasibility = std::max(s.dual_infeasibility, -d * std::min(1.0, up_gap));
    }
    if (r.basis.state[j] == solver::Basis::State::Basic && (lo_gap <= kBoundTol || up_gap <= kBoundTol)) s.tied = true;
  }
  return s;
}

DispatchResult assemble(const DispatchCase& c, std::size_t first, std::vector<HourSolution>& hours) {
  for (std::size_t k = 0; k < hours.size(); ++k) {
    if (hours[k].infeasible) {
      throw InfeasibleError("clear_market: demand cannot be served at hour " + std::to_string(first + k));
    }
  }
  DispatchResult out;
  out.first_hour = first;
  for (const auto& g : c.generators) out.generator_ids.push_back(g.id);
  for (const auto& l : c.lines) out.line_ids.push_back(l.id);
  const std::size_t h = hours.size();
  out.generation.assign(c.generators.size(), std::vector<double>(h));
  out.flows.assign(c.lines.size(), std::vector<double>(h));
  for (auto& p : out.prices) p.resize(h);
  out.hourly_cost.resize(h);
  out.tied.resize(h);
  for (std::size_t k = 0; k < h; ++k) {
    const auto& s = hours[k];
    for (std::size_t g = 0; g < s.generation.size(); ++g) out.generation[g][k] = s.generation[g];
    for (std::size_t l = 0; l < s.flows.size(); ++l) out.flows[l][k] = s.flows[l];
    for (std::size_t n = 0; n < kNodeCount; ++n) out.prices[n][k] = s.prices[n];
    out.hourly_cost[k] = s.cost;
    out.tied[k] = s.tied;
    out.total_cost += s.cost;
    out.max_balance_residual = std::max(out.max_balance_residual, s.balance_residual);
    out.max_complementarity = std::max(out.max_complementarity, s.complementarity);
    out.max_dual_infeasibility = std::max(out.max_dual_infeasibility, s.dual_infeasibility);
  }
  return out;
}

std::pair<std::size_t, std::size_t> hour_range(const DispatchCase& c, std::size_t first, std::size_t last) {
  c.validate();
  last = std::min(last, c.hours());
  if (first > last) throw ParameterError("clear_market: empty or reversed hour range");
  return {first, last};
}

}  // namespace

std::string to_string(Node node) {
  switch (node) {
    case Node::BE: return "BE";
    case Node::EI: return "EI";
    case Node::UK: return "UK";
  }
  return "?";
}

void DispatchCase::validate() const {
  const std::size_t h = hours();
  for (std::size_t n = 0; n < kNodeCount; ++n) {
    if (demand[n].size() != h) throw ShapeError("dispatch case: demand series differ in length");
    require_nonnegative(demand[n], to_string(static_cast<Node>(n)) + " demand");
  }
  for (const auto& g : generators) {
    if (g.price.size() != h || g.capacity.size() != h) throw ShapeError("dispatch case: generator " + g.id + " length");
    require_nonnegative(g.capacity, "capacity of " + g.id);
    for (double p : g.price) {
      if (!std::isfinite(p)) throw DataError("dispatch case: non-finite price for " + g.id);
    }
  }
  for (const auto& l : lines) {
    if (!(l.capacity >= 0.0) || !std::isfinite(l.capacity)) throw DataError("dispatch case: bad capacity for " + l.id);
    if (l.from == l.to) throw DataError("dispatch case: line " + l.id + " is a self-loop");
  }
}

DispatchCase build_case2(std::span<const double> prices_be, std::span<const double> prices_uk,
                         std::span<const double> demand_be, std::span<const double> demand_uk,
                         std::span<const double> wind, const Case2Options& o) {
  const std::size_t h = prices_be.size();
  if (prices_uk.size() != h || demand_be.size() != h || demand_uk.size() != h || wind.size() != h) {
    throw ShapeError("build_case2: input series must be aligned");
  }
  require_nonnegative(demand_be, "BE demand");
  require_nonnegative(demand_uk, "UK demand");
  require_nonnegative(wind, "wind availability");
  if (o.wind_rating > 0.0) {
    for (std::size_t i = 0; i < h; ++i) {
      if (wind[i] > o.wind_rating + 1e-9) throw DataError("build_case2: wind exceeds the plant rating at hour " + std::to_string(i));
    }
  }
  if (!(o.block_size >= 0.0) || !(o.bid_factor > 0.0) || !(o.infinite_cap_factor > 0.0)) {
    throw ParameterError("build_case2: block size, bid factor and cap factor must be positive");
  }

  auto scaled = [&](std::span<const double> p) {
    std::vector<double> out(p.begin(), p.end());
    for (double& v : out) v *= o.bid_factor;
    return out;
  };
  auto block_cap = [&](std::span<const double> d) {
    std::vector<double> out(h);
    for (std::size_t i = 0; i < h; ++i) {
      out[i] = o.block_rule == BlockRule::DemandMinusBlock ? std::max(0.0, d[i] - o.block_size) : o.block_size;
    }
    return out;
  };
  auto infinite_cap = [&](std::span<const double> d) {
    const double peak = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
    return std::vector<double>(h, o.infinite_cap_factor * std::max(peak, 1.0));
  };

  DispatchCase c;
  c.demand[static_cast<std::size_t>(Node::BE)].assign(demand_be.begin(), demand_be.end());
  c.demand[static_cast<std::size_t>(Node::EI)].assign(h, 0.0);
  c.demand[static_cast<std::size_t>(Node::UK)].assign(demand_uk.begin(), demand_uk.end());
  c.generators.push_back({"g1", Node::UK, GeneratorKind::Infinite, {prices_uk.begin(), prices_uk.end()}, infinite_cap(demand_uk)});
  c.generators.push_back({"g2", Node::UK, GeneratorKind::Block, scaled(prices_uk), block_cap(demand_uk)});
  c.generators.push_back({"g3", Node::BE, GeneratorKind::Infinite, {prices_be.begin(), prices_be.end()}, infinite_cap(demand_be)});
  c.generators.push_back({"g4", Node::BE, GeneratorKind::Block, scaled(prices_be), block_cap(demand_be)});
  c.generators.push_back({"owpp", Node::EI, GeneratorKind::Wind, scaled(prices_be), {wind.begin(), wind.end()}});
  c.lines.push_back({kLineNemo, Node::BE, Node::UK, o.nemo_capacity});
  c.lines.push_back({kLineNautilusUk, Node::EI, Node::UK, o.nautilus_uk_capacity});
  c.lines.push_back({kLineNautilusBe, Node::BE, Node::EI, o.nautilus_be_capacity});
  c.lines.push_back({kLineHvac, Node::BE, Node::EI, o.hvac_capacity});
  c.validate();
  return c;
}

DispatchResult clear_market(const DispatchCase& dispatch_case, std::size_t first, std::size_t last) {
  const auto [lo, hi] = hour_range(dispatch_case, first, last);
  std::vector<HourSolution> hours(hi - lo);
  const auto count = static_cast<std::ptrdiff_t>(hours.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    hours[static_cast<std::size_t>(k)] = solve_hour(dispatch_case, lo + static_cast<std::size_t>(k));
  }
  return assemble(dispatch_case, lo, hours);
}

DispatchResult clear_market_serial(const DispatchCase& dispatch_case, std::size_t first, std::size_t last) {
  const auto [lo, hi] = hour_range(dispatch_case, first, last);
  std::vector<HourSolution> hours(hi - lo);
  for (std::size_t k = 0; k < hours.size(); ++k) hours[k] = solve_hour(dispatch_case, lo + k);
  return assemble(dispatch_case, lo, hours);
}

std::vector<double> extract_flows(const DispatchResult& result, const std::string& line_id) {
  const auto it = std::find(result.line_ids.begin(), result.line_ids.end(), line_id);
  if (it == result.line_ids.end()) throw LookupError("extract_flows: unknown line '" + line_id + "'");
  return result.flows[static_cast<std::size_t>(it - result.line_ids.begin())];
}

HoaFlows extract_hoa_flows(const DispatchResult& result) {
  HoaFlows f;
  f.be_side = extract_flows(result, kLineNautilusBe);
  const auto hvac = extract_flows(result, kLineHvac);
  for (std::size_t i = 0; i < f.be_side.size(); ++i) f.be_side[i] += hvac[i];
  f.uk_side = extract_flows(result, kLineNautilusUk);
  return f;
}

void write_dispatch_csv(const std::filesystem::path& path, const DispatchResult& result,
                        std::span<const std::string> timestamps, const std::string& header_comment) {
  if (!timestamps.empty() && timestamps.size() != result.hours()) {
    throw ShapeError("write_dispatch_csv: timestamp count differs from result hours");
  }
  std::ofstream out(path);
  if (!out) throw DataError("write_dispatch_csv: cannot open " + path.string());
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "timestamp,price_be,price_ei,price_uk";
  for (const auto& id : result.line_ids) out << ",flow_" << id;
  out << ",tied\n";
  for (std::size_t k = 0; k < result.hours(); ++k) {
    if (timestamps.empty()) {
      out << result.first_hour + k;
    } else {
      out << timestamps[k];
    }
    for (std::size_t n = 0; n < kNodeCount; ++n) out << ',' << format_double(result.prices[n][k]);
    for (const auto& f : result.flows) out << ',' << format_double(f[k]);
    out << ',' << (result.tied[k] ? 1 : 0) << '\n';
  }
}

}  // namespace ira
