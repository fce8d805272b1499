#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ira/solver/linear_program.hpp"
#include "ira/solver/simplex.hpp"

namespace ira::solver {

struct BruteForceResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::uint64_t best_pattern = 0;
  std::size_t patterns = 0;
  std::size_t feasible_patterns = 0;
};

/// Largest enumeration width (2^16 patterns).
constexpr std::size_t kBruteForceMaxBits = 16;

/// Exhaustive oracle: fixes every binary pattern and solves the remaining LP from scratch.
///
/// For per-step problems whose binaries come in complementary pairs (horizon N, binary
/// columns k and k + N), bit i of the pattern sets the first binary of step i and its
/// partner gets the complement, giving 2^N patterns. Otherwise all 2^|binary| patterns
/// are enumerated. Ties go to the lowest pattern number. Throws SizeError beyond 16 bits.
BruteForceResult brute_force(const MilpProblem& problem, const SimplexOptions& options = {});

/// Single-threaded reference with identical results.
BruteForceResult brute_force_serial(const MilpProblem& problem, const SimplexOptions& options = {});

}  // namespace ira::solver
