#include "ira/solver/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>

#include "ira/error.hpp"

namespace ira::solver {

namespace {

struct Fixing {
  std::size_t col;
  double value;
};

struct Node {
  std::size_t id;
  double bound;
  std::vector<Fixing> fixings;
  std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

double relative_gap(double incumbent, double bound) {
  return (incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

// Tolerance used to accept a repaired or integral point as an incumbent.
constexpr double kAcceptTol = 1e-7;

}  // namespace

void BnbConfig::validate() const {
  if (!(integer_tol > 0.0) || !(gap_tol > 0.0)) throw ParameterError("BnbConfig: tolerances must be positive");
  if (!(time_limit > 0.0)) throw ParameterError("BnbConfig: time limit must be positive");
  if (node_limit == 0) throw ParameterError("BnbConfig: node limit must be positive");
  if (log_interval == 0) throw ParameterError("BnbConfig: log interval must be positive");
}

MilpResult solve_milp(const MilpProblem& problem, const BnbConfig& config, const BnbHooks& hooks) {
  config.validate();
  problem.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&]() { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  MilpResult result;
  DualSimplex lp(problem, config.lp);

  double incumbent = std::numeric_limits<double>::infinity();
  auto try_incumbent = [&](std::vector<double> x) {
    if (problem.max_violation(x, true) > kAcceptTol) return false;
    for (std::size_t j : problem.binary_idx) x[j] = std::round(x[j]);
    const double obj = problem.evaluate_objective(x);
    if (obj < incumbent) {
      incumbent = obj;
      result.x = std::move(x);
      result.has_incumbent = true;
      return true;
    }
    return false;
  };

  auto log_line = [&](std::size_t node, double bound) {
    if (config.log == nullptr) return;
    const double gap = result.has_incumbent ? relative_gap(incumbent, bound) : std::numeric_limits<double>::infinity();
    *config.log << node << ", " << bound << ", " << incumbent << ", " << gap << ", ";
    if (config.log_elapsed) {
      *config.log << elapsed() << '\n';
    } else {
      *config.log << "-\n";
    }
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push(Node{0, -std::numeric_limits<double>::infinity(), {}, nullptr});
  std::size_t next_id = 1;
  bool limit_hit = false;
  double best_bound = -std::numeric_limits<double>::infinity();

  while (!open.empty()) {
    best_bound = open.top().bound;
    if (result.has_incumbent && relative_gap(incumbent, best_bound) <= config.gap_tol) break;
    if (result.nodes >= config.node_limit || elapsed() > config.time_limit) {
      limit_hit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    ++result.nodes;

    for (std::size_t j : problem.binary_idx) lp.set_column_bounds(j, problem.lower[j], problem.upper[j]);
    for (const auto& f : node.fixings) lp.set_column_bounds(f.col, f.value, f.value);
    if (node.basis) lp.warm_start(*node.basis);
    LpResult rel = lp.solve();
    result.lp_iterations += rel.iterations;
    if (node.id == 0 && rel.status == LpStatus::Optimal) result.root_objective = rel.objective;

    if (rel.status == LpStatus::Infeasible) continue;
    if (rel.status == LpStatus::Unbounded) throw NumericError("solve_milp: LP relaxation is unbounded");
    if (rel.status == LpStatus::Limit) {
      limit_hit = true;
      break;
    }
    if (result.has_incumbent && relative_gap(incumbent, rel.objective) <= config.gap_tol) continue;

    std::vector<std::size_t> fractional;
    for (std::size_t j : problem.binary_idx) {
      const double v = rel.x[j];
      if (std::abs(v - std::round(v)) > config.integer_tol) fractional.push_back(j);
    }
    std::sort(fractional.begin(), fractional.end());
    if (fractional.empty()) {
      if (try_incumbent(rel.x)) log_line(result.nodes, std::min(best_bound, rel.objective));
      continue;
    }
    if (hooks.repair) {
      if (auto cand = hooks.repair(rel.x)) {
        if (try_incumbent(std::move(*cand))) log_line(result.nodes, std::min(best_bound, rel.objective));
        if (relative_gap(incumbent, rel.objective) <= config.gap_tol) continue;
      }
    }

    std::vector<std::size_t> candidates = fractional;
    if (hooks.branch_candidates) {
      std::vector<std::size_t> preferred = hooks.branch_candidates(rel.x);
      std::vector<std::size_t> both;
      for (std::size_t j : preferred) {
        if (std::binary_search(fractional.begin(), fractional.end(), j)) both.push_back(j);
      }
      if (!both.empty()) candidates = std::move(both);
    }
    std::size_t branch = candidates.front();
    double best_frac = -1.0;
    for (std::size_t j : candidates) {
      const double v = rel.x[j];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac + 1e-12 || (std::abs(frac - best_frac) <= 1e-12 && j < branch)) {
        best_frac = frac;
        branch = j;
      }
    }

    std::shared_ptr<const Basis> basis;
    if (config.warm_start == WarmStart::Parent) basis = std::make_shared<const Basis>(std::move(rel.basis));
    for (double value : {0.0, 1.0}) {
      Node child{next_id++, rel.objective, node.fixings, basis};
      child.fixings.push_back({branch, value});
      open.push(std::move(child));
    }
    if (config.log != nullptr && result.nodes % config.log_interval == 0) log_line(result.nodes, best_bound);
  }

  if (open.empty() && !limit_hit) best_bound = result.has_incumbent ? incumbent : best_bound;
  result.seconds = elapsed();
  if (result.has_incumbent) {
    result.objective = incumbent;
    result.best_bound = std::min(best_bound, incumbent);
    result.gap = relative_gap(incumbent, result.best_bound);
    result.status = limit_hit ? LpStatus::Limit : LpStatus::Optimal;
  } else {
    result.best_bound = best_bound;
    result.gap = std::numeric_limits<double>::infinity();
    result.status = limit_hit ? LpStatus::Limit : LpStatus::Infeasible;
  }
  log_line(result.nodes, result.best_bound);
  return result;
}

}  // namespace ira::solver
