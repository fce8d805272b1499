#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ira/arbitrage.hpp"
#include "ira/metrics.hpp"
#include "ira/synthetic.hpp"

namespace ira {

/// C1: grid A only. C2: both grids, interconnector always available. C3: both grids within
/// the flow envelope. K1: single-market LP over the pointwise-best prices.
enum class Scenario { C1, C2, C3, K1 };

std::string to_string(Scenario s);
/// Throws ConfigError.
Scenario parse_scenario(const std::string& text);

/// Aligned hourly inputs for one study horizon.
struct StudyData {
  std::vector<std::string> timestamps;
  std::vector<double> price_a;  // EUR/MWh
  std::vector<double> price_b;  // EUR/MWh
  /// Interconnector flow in MW, positive A -> B. For the island case this is the A-side corridor.
  std::vector<double> flow;
  /// Island case only: B-side corridor flow, positive toward B.
  std::vector<double> flow_b_side;

  std::size_t size() const { return price_a.size(); }
  bool hybrid() const { return !flow_b_side.empty(); }
  /// Throws ShapeError on inconsistent lengths.
  void validate() const;
  /// Steps [first, first + count).
  StudyData slice(std::size_t first, std::size_t count) const;
};

StudyData study_data_from(const SyntheticDataset& d);

enum class BlockingSplit {
  /// Half raises b_min', half lowers b_max'.
  Symmetric,
  RaiseMin,
  LowerMax,
};

std::string to_string(BlockingSplit s);
BlockingSplit parse_blocking_split(const std::string& text);

/// Throws ParameterError if b_block is negative or exceeds b_max - b_min.
BlockingSpec make_blocking(const BatteryParams& p, double b_block, BlockingSplit split);

struct StudySettings {
  BatteryParams battery;
  double rent = 0.0;         // EUR/MWh, uniform
  double eta_line = 0.975;
  double l_max = 1000.0;     // MW, single link or A-side corridor
  double l_max_b_side = 1400.0;
  double b_block = 0.0;      // MWh
  BlockingSplit split = BlockingSplit::Symmetric;
  /// Firm cross-border right as a fraction of the battery ramp limit (C3 only).
  double reserved_fraction = 0.0;
  bool terminal_soc = false;
  K1Efficiency k1_efficiency = K1Efficiency::AsWritten;
  solver::BnbConfig solver;
};

struct ScenarioResult {
  Scenario scenario = Scenario::C1;
  /// For K1 the trajectory sits in x_a and x_b is zero.
  ArbitrageSolution solution;
  Metrics metrics;
  solver::MilpResult search;
  OperatingEnvelope envelope;
  /// Per-market revenue; absent for K1.
  std::optional<RevenueSplit> split;
  double seconds = 0.0;
};

PriceSet study_prices(const StudyData& data, const StudySettings& settings);
OperatingEnvelope scenario_envelope(const StudyData& data, const StudySettings& settings, Scenario scenario);

/// The two-market MILP for C1, C2 or C3. Throws ParameterError for K1.
ArbitrageProblem scenario_problem(const StudyData& data, const StudySettings& settings, Scenario scenario);

/// Builds and solves one scenario and computes its metrics. Throws InfeasibleError when the
/// MILP has no solution; a node or time limit leaves `solution.status == Limit`.
ScenarioResult run_scenario(const StudyData& data, const StudySettings& settings, Scenario scenario);

/// Horizon metrics for a trajectory starting at b0.
Metrics compute_metrics(const ArbitrageSolution& solution, const StudyData& data, const StudySettings& settings);

}  // namespace ira
