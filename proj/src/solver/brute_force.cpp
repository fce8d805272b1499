#include "ira/solver/brute_force.hpp"

#include <cmath>
#include <limits>

#include "ira/error.hpp"

namespace ira::solver {

namespace {

struct PatternLayout {
  std::vector<std::size_t> primary;
  std::vector<std::size_t> partner;  // empty when binaries are not paired
};

PatternLayout pattern_layout(const MilpProblem& problem) {
  PatternLayout layout;
  const std::size_t n = problem.horizon;
  const auto& bin = problem.binary_idx;
  bool paired = n > 0 && bin.size() == 2 * n;
  if (paired) {
    for (std::size_t i = 0; i < n; ++i) {
      if (bin[i] + n != bin[n + i]) {
        paired = false;
        break;
      }
    }
  }
  if (paired) {
    layout.primary.assign(bin.begin(), bin.begin() + static_cast<std::ptrdiff_t>(n));
    layout.partner.assign(bin.begin() + static_cast<std::ptrdiff_t>(n), bin.end());
  } else {
    layout.primary = bin;
  }
  if (layout.primary.size() > kBruteForceMaxBits) {
    throw SizeError("brute_force: " + std::to_string(layout.primary.size()) + " pattern bits exceed the limit of " +
                    std::to_string(kBruteForceMaxBits));
  }
  return layout;
}

LpResult solve_pattern(MilpProblem& work, const PatternLayout& layout, std::uint64_t mask,
                       const SimplexOptions& options) {
  for (std::size_t b = 0; b < layout.primary.size(); ++b) {
    const double v = ((mask >> b) & 1U) ? 1.0 : 0.0;
    work.lower[layout.primary[b]] = work.upper[layout.primary[b]] = v;
    if (!layout.partner.empty()) work.lower[layout.partner[b]] = work.upper[layout.partner[b]] = 1.0 - v;
  }
  return solve_lp(work, options);
}

struct PatternValue {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
};

PatternValue summarize(const LpResult& r) { return {r.status, r.objective}; }

// The winning pattern is re-solved to recover its point, so only scalars are kept per pattern.
BruteForceResult reduce(const MilpProblem& problem, const PatternLayout& layout, const std::vector<PatternValue>& values,
                        const SimplexOptions& options) {
  BruteForceResult best;
  best.patterns = values.size();
  double best_obj = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < values.size(); ++mask) {
    const auto& r = values[mask];
    if (r.status == LpStatus::Unbounded) throw NumericError("brute_force: pattern LP is unbounded");
    if (r.status == LpStatus::Limit) throw NumericError("brute_force: pattern LP hit the iteration limit");
    if (r.status != LpStatus::Optimal) continue;
    ++best.feasible_patterns;
    if (r.objective < best_obj) {
      best_obj = r.objective;
      best.best_pattern = mask;
    }
  }
  if (best.feasible_patterns > 0) {
    MilpProblem work = problem;
    LpResult r = solve_pattern(work, layout, best.best_pattern, options);
    best.status = LpStatus::Optimal;
    best.objective = best_obj;
    best.x = std::move(r.x);
  }
  return best;
}

}  // namespace

BruteForceResult brute_force_serial(const MilpProblem& problem, const SimplexOptions& options) {
  problem.validate();
  const PatternLayout layout = pattern_layout(problem);
  const std::size_t count = std::size_t{1} << layout.primary.size();
  std::vector<PatternValue> values(count);
  MilpProblem work = problem;
  for (std::size_t mask = 0; mask < count; ++mask) values[mask] = summarize(solve_pattern(work, layout, mask, options));
  return reduce(problem, layout, values, options);
}

BruteForceResult brute_force(const MilpProblem& problem, const SimplexOptions& options) {
#ifdef IRA_HAVE_OPENMP
  problem.validate();
  const PatternLayout layout = pattern_layout(problem);
  const std::size_t count = std::size_t{1} << layout.primary.size();
  std::vector<PatternValue> values(count);
  bool failed = false;
  std::string message;
#pragma omp parallel
  {
    MilpProblem work = problem;
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t mask = 0; mask < static_cast<std::ptrdiff_t>(count); ++mask) {
      try {
        values[static_cast<std::size_t>(mask)] =
            summarize(solve_pattern(work, layout, static_cast<std::uint64_t>(mask), options));
      } catch (const std::exception& e) {
#pragma omp critical(ira_brute_force_error)
        {
          failed = true;
          message = e.what();
        }
      }
    }
  }
  if (failed) throw NumericError("brute_force: " + message);
  return reduce(problem, layout, values, options);
#else
  return brute_force_serial(problem, options);
#endif
}

}  // namespace ira::solver
