#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ira/battery.hpp"
#include "ira/envelope.hpp"
#include "ira/solver/branch_and_bound.hpp"
#include "ira/solver/linear_program.hpp"

namespace ira {

/// Usable SoC band after part of the battery is held back for other services.
struct BlockingSpec {
  double b_max_prime = 0.0;
  double b_min_prime = 0.0;

  /// No blocking: the full [b_min, b_max] band.
  static BlockingSpec none(const BatteryParams& p);
  /// Splits b_block evenly between raising b_min and lowering b_max.
  static BlockingSpec symmetric(const BatteryParams& p, double b_block);

  double b_block(const BatteryParams& p) const { return (p.b_max - b_max_prime) + (b_min_prime - p.b_min); }
  /// Throws ParameterError unless b_min <= b_min' <= b_max' <= b_max.
  void validate(const BatteryParams& p) const;
};

struct PmilpOptions {
  /// Appends one equality row b_N = b0 after the 13N standard rows.
  bool terminal_soc = false;
};

/// Column layout [x_a, x_b, t_a, t_b, z_ch, z_dis], each block N long.
/// Row blocks (N rows each): epigraph cuts A buy/sell, B buy/sell, capacity upper/lower,
/// joint ramp upper/lower, four sign-linking rows, z_ch + z_dis = 1.
///
/// z_ch_i = 1 forces x_a_i, x_b_i <= 0 and z_dis_i = 1 forces them >= 0 (the naming
/// follows the linking rows x >= z_ch X_min, x <= z_dis X_max).
struct ArbitrageProblem {
  solver::MilpProblem milp;
  BatteryParams battery;
  OperatingEnvelope envelope;
  BlockingSpec blocking;
  double eta_ch_star = 1.0;
  double eta_dis_star = 1.0;

  std::size_t horizon() const { return milp.horizon; }
  std::size_t col_x_a(std::size_t i) const { return i; }
  std::size_t col_x_b(std::size_t i) const { return horizon() + i; }
  std::size_t col_t_a(std::size_t i) const { return 2 * horizon() + i; }
  std::size_t col_t_b(std::size_t i) const { return 3 * horizon() + i; }
  std::size_t col_z_ch(std::size_t i) const { return 4 * horizon() + i; }
  std::size_t col_z_dis(std::size_t i) const { return 5 * horizon() + i; }
};

constexpr std::size_t kPmilpRowBlocks = 13;
constexpr std::size_t kPmilpColBlocks = 6;

ArbitrageProblem build_pmilp(const PriceSet& prices, const BatteryParams& battery, const OperatingEnvelope& envelope,
                             const BlockingSpec& blocking, const PmilpOptions& options = {});

struct ArbitrageSolution {
  std::vector<double> x_a;
  std::vector<double> x_b;
  std::vector<double> t_a;
  std::vector<double> t_b;
  std::vector<int> z_ch;
  std::vector<int> z_dis;
  std::vector<double> soc;
  double objective = 0.0;
  solver::LpStatus status = solver::LpStatus::Optimal;

  double revenue() const { return -objective; }
};

/// Slices a raw solver vector, rounds binaries, sets z_ch=0/z_dis=1 at idle steps and
/// re-checks battery feasibility. Throws SolverInconsistencyError if the check fails.
ArbitrageSolution decode_solution(const ArbitrageProblem& problem, std::span<const double> raw_x,
                                  solver::LpStatus status = solver::LpStatus::Optimal);

/// Equivalent problem for the solver: the two triangular capacity blocks are replaced by
/// N balance rows s_i - s_{i-1} - x_a_i - x_b_i = 0 over N extra SoC-offset columns
/// s_i = b_i - b0 bounded by [b_min' - b0, b_max' - b0]. The first 6N columns keep the
/// standard layout, so solutions map back by truncation. Rows: 12N, columns: 7N.
solver::MilpProblem compact_view(const ArbitrageProblem& problem);

/// Convenience: branch-and-bound on the compact view with the arbitrage hooks, then decode.
ArbitrageSolution solve_arbitrage(const ArbitrageProblem& problem, const solver::BnbConfig& config = {},
                                  solver::MilpResult* raw = nullptr);

/// Problem-specific heuristics for branch-and-bound: sign repair and conflict-step branching.
solver::BnbHooks make_bnb_hooks(const ArbitrageProblem& problem);

struct RevenueSplit {
  double revenue_a = 0.0;
  double revenue_b = 0.0;
  double bought_a = 0.0;  // grid-side MWh
  double sold_a = 0.0;
  double bought_b = 0.0;
  double sold_b = 0.0;

  double total() const { return revenue_a + revenue_b; }
};

RevenueSplit revenue_split(const ArbitrageSolution& solution, const ArbitrageProblem& problem, const PriceSet& prices);

/// `t,x_a,x_b,soc,z_ch` with an optional leading comment line.
void write_solution_csv(const std::filesystem::path& path, const ArbitrageSolution& solution,
                        const std::string& header_comment = {});

enum class K1Efficiency {
  /// Raw charge/discharge efficiencies, no converter loss.
  AsWritten,
  /// Efficiencies including the converter, same as the two-market model.
  Inverter,
};

/// Single-market baseline over pointwise-best prices: columns [x, t], rows buy cut,
/// sell cut, capacity upper, capacity lower (4N x 2N).
struct K1Problem {
  solver::MilpProblem lp;
  BatteryParams battery;
  std::vector<double> best_buy;
  std::vector<double> best_sell;
  double eta_ch = 1.0;
  double eta_dis = 1.0;
};

K1Problem build_k1(const PriceSet& prices, const BatteryParams& battery,
                   K1Efficiency efficiency = K1Efficiency::AsWritten);

struct K1Solution {
  std::vector<double> x;
  std::vector<double> soc;
  double objective = 0.0;
  solver::LpStatus status = solver::LpStatus::Optimal;
  double revenue() const { return -objective; }
};

K1Solution solve_k1(const K1Problem& problem);

}  // namespace ira
