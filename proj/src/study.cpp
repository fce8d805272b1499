#include "ira/study.hpp"

#include <chrono>
#include <cmath>

#include "ira/error.hpp"

namespace ira {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::C1: return "C1";
    case Scenario::C2: return "C2";
    case Scenario::C3: return "C3";
    case Scenario::K1: return "K1";
  }
  return "?";
}

Scenario parse_scenario(const std::string& text) {
  if (text == "C1" || text == "c1") return Scenario::C1;
  if (text == "C2" || text == "c2") return Scenario::C2;
  if (text == "C3" || text == "c3") return Scenario::C3;
  if (text == "K1" || text == "k1") return Scenario::K1;
  throw ConfigError("unknown scenario '" + text + "' (expected C1, C2, C3 or K1)");
}

std::string to_string(BlockingSplit s) {
  switch (s) {
    case BlockingSplit::Symmetric: return "symmetric";
    case BlockingSplit::RaiseMin: return "raise_min";
    case BlockingSplit::LowerMax: return "lower_max";
  }
  return "?";
}

BlockingSplit parse_blocking_split(const std::string& text) {
  if (text == "symmetric") return BlockingSplit::Symmetric;
  if (text == "raise_min") return BlockingSplit::RaiseMin;
  if (text == "lower_max") return BlockingSplit::LowerMax;
  throw ConfigError("unknown blocking split '" + text + "' (expected symmetric, raise_min or lower_max)");
}

void StudyData::validate() const {
  const std::size_t n = size();
  if (price_b.size() != n) throw ShapeError("study data: price series differ in length");
  if (!timestamps.empty() && timestamps.size() != n) throw ShapeError("study data: timestamp count differs");
  if (!flow.empty() && flow.size() != n) throw ShapeError("study data: flow series length differs");
  if (!flow_b_side.empty() && flow_b_side.size() != n) throw ShapeError("study data: B-side flow length differs");
}

StudyData StudyData::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw ParameterError("study data: slice beyond the horizon");
  auto cut = [&](const auto& v) {
    using V = std::decay_t<decltype(v)>;
    if (v.empty()) return V{};
    return V(v.begin() + static_cast<std::ptrdiff_t>(first), v.begin() + static_cast<std::ptrdiff_t>(first + count));
  };
  StudyData s;
  s.timestamps = cut(timestamps);
  s.price_a = cut(price_a);
  s.price_b = cut(price_b);
  s.flow = cut(flow);
  s.flow_b_side = cut(flow_b_side);
  return s;
}

StudyData study_data_from(const SyntheticDataset& d) {
  StudyData s;
  s.timestamps = d.timestamps;
  s.price_a = d.price_a;
  s.price_b = d.price_b;
  s.flow = d.flow;
  return s;
}

BlockingSpec make_blocking(const BatteryParams& p, double b_block, BlockingSplit split) {
  if (!(b_block >= 0.0)) throw ParameterError("blocking: b_block must be nonnegative");
  if (b_block > p.b_max - p.b_min + 1e-12) throw ParameterError("blocking: b_block exceeds the battery capacity band");
  switch (split) {
    case BlockingSplit::Symmetric: return BlockingSpec::symmetric(p, b_block);
    case BlockingSplit::RaiseMin: return {p.b_max, p.b_min + b_block};
    case BlockingSplit::LowerMax: return {p.b_max - b_block, p.b_min};
  }
  return BlockingSpec::none(p);
}

PriceSet study_prices(const StudyData& data, const StudySettings& settings) {
  data.validate();
  return PriceSet::from_clearing(data.price_a, data.price_b, settings.rent, settings.eta_line);
}

OperatingEnvelope scenario_envelope(const StudyData& data, const StudySettings& settings, Scenario scenario) {
  const double x_min = settings.battery.x_min();
  const double x_max = settings.battery.x_max();
  const std::size_t n = data.size();
  switch (scenario) {
    case Scenario::C1:
      return OperatingEnvelope::closed(n);
    case Scenario::C2:
    case Scenario::K1:
      return OperatingEnvelope::full(n, x_min, x_max);
    case Scenario::C3: {
      if (data.flow.empty()) throw ConfigError("scenario C3 needs interconnector flows");
      LinkState a{settings.l_max, data.flow, settings.eta_line};
      OperatingEnvelope env;
      if (data.hybrid()) {
        LinkState b{settings.l_max_b_side, data.flow_b_side, settings.eta_line};
        env = envelope_hoa(a, b, x_min, x_max);
      } else {
        env = envelope_single_link(a, x_min, x_max);
      }
      if (settings.reserved_fraction > 0.0) {
        if (settings.reserved_fraction > 1.0) throw ParameterError("reserved fraction must lie in [0, 1]");
        env = reserve_capacity(env, settings.reserved_fraction * settings.battery.ramp_limit(), x_min, x_max);
      }
      return env;
    }
  }
  throw ParameterError("unknown scenario");
}

Metrics compute_metrics(const ArbitrageSolution& solution, const StudyData& data, const StudySettings& settings) {
  const auto& b = settings.battery;
  Metrics m;
  m.days = static_cast<double>(data.size()) * b.h / 24.0;
  m.revenue = solution.revenue();
  std::vector<double> path;
  path.reserve(solution.soc.size() + 1);
  path.push_back(b.b0);
  path.insert(path.end(), solution.soc.begin(), solution.soc.end());
  m.cycles = count_cycles(path, b.b_max);
  if (m.days > 0.0) {
    m.annual_revenue = annualize(m.revenue, m.days);
    m.annual_cycles = annualize(m.cycles, m.days);
  }
  m.spp = simple_payback(b.investment(), m.annual_revenue);
  const auto pc = cycles_to_payback(m.annual_cycles, m.spp, b.cycle_life_100dod);
  m.cycles_to_payback = pc.cycles;
  m.viable = pc.viable;
  if (!data.flow.empty() && settings.l_max > 0.0) m.uf = utilization_factor(data.flow, settings.l_max);
  return m;
}

ArbitrageProblem scenario_problem(const StudyData& data, const StudySettings& settings, Scenario scenario) {
  if (scenario == Scenario::K1) throw ParameterError("K1 is a single-market LP, not a two-market MILP");
  PmilpOptions opts;
  opts.terminal_soc = settings.terminal_soc;
  return build_pmilp(study_prices(data, settings), settings.battery, scenario_envelope(data, settings, scenario),
                     make_blocking(settings.battery, settings.b_block, settings.split), opts);
}

ScenarioResult run_scenario(const StudyData& data, const StudySettings& settings, Scenario scenario) {
  const auto start = std::chrono::steady_clock::now();
  const auto prices = study_prices(data, settings);
  const auto blocking = make_blocking(settings.battery, settings.b_block, settings.split);
  ScenarioResult r;
  r.scenario = scenario;
  r.envelope = scenario_envelope(data, settings, scenario);
  if (scenario == Scenario::K1) {
    BatteryParams blocked = settings.battery;
    blocked.b_min = blocking.b_min_prime;
    blocked.b_max = blocking.b_max_prime;
    const auto k = solve_k1(build_k1(prices, blocked, settings.k1_efficiency));
    if (k.status == solver::LpStatus::Infeasible) throw InfeasibleError("K1: single-market LP is infeasible");
    r.solution.x_a = k.x;
    r.solution.x_b.assign(k.x.size(), 0.0);
    r.solution.soc = k.soc;
    r.solution.objective = k.objective;
    r.solution.status = k.status;
    r.solution.z_ch.resize(k.x.size());
    r.solution.z_dis.resize(k.x.size());
    for (std::size_t i = 0; i < k.x.size(); ++i) {
      r.solution.z_ch[i] = k.x[i] < 0.0 ? 1 : 0;
      r.solution.z_dis[i] = 1 - r.solution.z_ch[i];
    }
    r.search.status = k.status;
    r.search.objective = k.objective;
    r.search.best_bound = k.objective;
    r.search.has_incumbent = true;
  } else {
    PmilpOptions opts;
    opts.terminal_soc = settings.terminal_soc;
    const auto problem = build_pmilp(prices, settings.battery, r.envelope, blocking, opts);
    r.solution = solve_arbitrage(problem, settings.solver, &r.search);
    if (r.search.has_incumbent) r.split = revenue_split(r.solution, problem, prices);
    if (!r.search.has_incumbent) {
      if (r.search.status == solver::LpStatus::Infeasible) {
        throw InfeasibleError("scenario " + to_string(scenario) + " is infeasible");
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return r;
    }
  }
  r.metrics = compute_metrics(r.solution, data, settings);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace ira
