#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ira {

enum class Node : std::size_t { BE = 0, EI = 1, UK = 2 };
constexpr std::size_t kNodeCount = 3;

std::string to_string(Node node);

/// Transport line; positive flow runs from `from` to `to`.
struct Line {
  std::string id;
  Node from;
  Node to;
  double capacity;  // MW, symmetric
};

enum class GeneratorKind { Infinite, Block, Wind };

struct Generator {
  std::string id;
  Node node;
  GeneratorKind kind;
  std::vector<double> price;     // EUR/MWh per hour
  std::vector<double> capacity;  // MW per hour
};

struct DispatchCase {
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::array<std::vector<double>, kNodeCount> demand;  // MW per hour

  std::size_t hours() const { return demand[0].size(); }
  /// Throws ShapeError on length mismatch and DataError on negative capacities or demand.
  void validate() const;
};

enum class BlockRule {
  /// Hourly capacity max(0, demand - block_size).
  DemandMinusBlock,
  /// Hourly capacity equal to block_size.
  BlockSize,
};

struct Case2Options {
  double block_size = 1000.0;  // MW
  BlockRule block_rule = BlockRule::DemandMinusBlock;
  double bid_factor = 0.95;
  /// Historical-price generators are capped at this multiple of the zone's peak demand.
  double infinite_cap_factor = 10.0;
  double nemo_capacity = 1000.0;
  double nautilus_uk_capacity = 1400.0;
  double nautilus_be_capacity = 1400.0;
  double hvac_capacity = 2100.0;
  /// Upper bound on the wind series; 0 disables the check.
  double wind_rating = 0.0;
};

/// Line ids used by build_case2. All are oriented toward the UK.
inline constexpr const char* kLineNemo = "nemo";                // BE -> UK
inline constexpr const char* kLineNautilusUk = "nautilus_uk";  // EI -> UK
inline constexpr const char* kLineNautilusBe = "nautilus_be";  // BE -> EI
inline constexpr const char* kLineHvac = "hvac";               // BE -> EI

/// Three-node island case: historical-price units g1 (UK) and g3 (BE), block units g2 (UK)
/// and g4 (BE) bidding 0.95 of the zonal price, and the island wind farm bidding 0.95 of
/// the BE price. Throws DataError on negative demand or wind, ShapeError on length mismatch.
DispatchCase build_case2(std::span<const double> prices_be, std::span<const double> prices_uk,
                         std::span<const double> demand_be, std::span<const double> demand_uk,
                         std::span<const double> wind, const Case2Options& options = {});

struct DispatchResult {
  std::size_t first_hour = 0;
  std::vector<std::string> generator_ids;
  std::vector<std::string> line_ids;
  std::vector<std::vector<double>> generation;  // [generator][hour]
  std::vector<std::vector<double>> flows;       // [line][hour]
  std::array<std::vector<double>, kNodeCount> prices;  // balance duals, EUR/MWh
  std::vector<double> hourly_cost;
  /// Hours where a basic variable sits at a bound, so the reported duals may not be unique.
  std::vector<bool> tied;
  double total_cost = 0.0;
  double max_balance_residual = 0.0;     // MW
  double max_complementarity = 0.0;      // |reduced cost| * distance to nearest bound
  double max_dual_infeasibility = 0.0;   // reduced-cost sign violations

  std::size_t hours() const { return hourly_cost.size(); }
};

/// Solves one dispatch LP per hour in [first, last). Hours run in parallel when OpenMP is
/// enabled; results are identical to the serial version. Throws InfeasibleError naming the
/// first hour whose demand cannot be served.
DispatchResult clear_market(const DispatchCase& dispatch_case, std::size_t first = 0, std::size_t last = SIZE_MAX);
DispatchResult clear_market_serial(const DispatchCase& dispatch_case, std::size_t first = 0,
                                   std::size_t last = SIZE_MAX);

/// Flow series of one line. Throws LookupError for unknown ids.
std::vector<double> extract_flows(const DispatchResult& result, const std::string& line_id);

/// Aggregate island corridors for the envelope module, both positive toward the UK:
/// BE side = nautilus_be + hvac, UK side = nautilus_uk.
struct HoaFlows {
  std::vector<double> be_side;
  std::vector<double> uk_side;
};
HoaFlows extract_hoa_flows(const DispatchResult& result);

/// `timestamp,price_be,price_ei,price_uk,flow_<id>...,tied`; `timestamps` may be empty.
void write_dispatch_csv(const std::filesystem::path& path, const DispatchResult& result,
                        std::span<const std::string> timestamps, const std::string& header_comment = {});

}  // namespace ira
