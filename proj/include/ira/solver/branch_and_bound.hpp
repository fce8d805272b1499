#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "ira/solver/linear_program.hpp"
#include "ira/solver/simplex.hpp"

namespace ira::solver {

enum class WarmStart {
  /// Re-install the parent's optimal basis (one refactorization per node).
  Parent,
  /// Continue from the basis of the previously solved node; any basis is dual feasible
  /// after bound changes, so this skips the refactorization.
  Previous,
};

struct BnbConfig {
  double integer_tol = 1e-6;
  /// Relative gap (incumbent - bound) / max(1, |incumbent|).
  double gap_tol = 1e-7;
  std::size_t node_limit = 5'000'000;
  double time_limit = 3600.0;  // seconds
  /// Receives `node, bound, incumbent, gap, time` lines when set.
  std::ostream* log = nullptr;
  std::size_t log_interval = 1000;
  /// Write `-` instead of elapsed seconds so logs of identical runs match byte for byte.
  bool log_elapsed = true;
  WarmStart warm_start = WarmStart::Previous;
  SimplexOptions lp;

  void validate() const;
};

/// Optional problem knowledge plugged into the generic search.
struct BnbHooks {
  /// Given a node's LP solution, propose an integral point. Proposals are re-checked
  /// against rows, bounds and integrality before they can become the incumbent.
  std::function<std::optional<std::vector<double>>(std::span<const double> lp_x)> repair;
  /// Restricts branching to these binary columns when the list is nonempty.
  std::function<std::vector<std::size_t>(std::span<const double> lp_x)> branch_candidates;
};

struct MilpResult {
  /// Optimal, Infeasible, or Limit (node/time limit; `x` holds the incumbent if any).
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;
  bool has_incumbent = false;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double root_objective = 0.0;
  double seconds = 0.0;
};

/// Best-bound-first branch-and-bound over `binary_idx`. Children are warm-started from the
/// parent basis. Branches on the most fractional binary, ties to the lowest index. Serial
/// and deterministic.
MilpResult solve_milp(const MilpProblem& problem, const BnbConfig& config = {}, const BnbHooks& hooks = {});

}  // namespace ira::solver
