#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ira/analytics.hpp"
#include "ira/data_ingest.hpp"
#include "ira/dispatch.hpp"
#include "ira/study.hpp"
#include "ira/synthetic.hpp"

namespace ira {

enum class DataSource { Synthetic, Files };
/// Where the C3 envelope flows come from.
enum class EnvelopeSource { Flows, Dispatch };
/// Single interconnector or the island's two corridors.
enum class LinkLayout { Single, Hybrid };

struct DataConfig {
  DataSource source = DataSource::Synthetic;
  /// Base for relative series paths.
  std::filesystem::path dir;
  std::string price_a, price_b, flow, flow_b_side, demand_a, demand_b, wind;
  Unit price_a_unit = Unit::EurPerMwh;
  Unit price_b_unit = Unit::GbpPerMwh;
  /// Inclusive UTC dates `YYYY-MM-DD`; empty keeps everything.
  std::string start, end;
  SyntheticOptions synthetic;
};

struct SweepConfig {
  SweepKind kind = SweepKind::Rent;
  std::vector<double> values;
};

/// Everything one run needs. Built from an INI file with sections battery, market, data,
/// study, solver, dispatch, sweep and output; absent keys keep their defaults.
struct StudyConfig {
  BatteryParams battery;
  double rent = 0.0;
  double eta_line = 0.975;
  double l_max = 1000.0;
  double l_max_b_side = 1400.0;

  DataConfig data;

  Scenario scenario = Scenario::C3;
  double b_block = 0.0;
  BlockingSplit split = BlockingSplit::Symmetric;
  double reserved_fraction = 0.0;
  bool terminal_soc = false;
  K1Efficiency k1_efficiency = K1Efficiency::AsWritten;
  EnvelopeSource envelope_source = EnvelopeSource::Flows;
  LinkLayout link = LinkLayout::Single;

  solver::BnbConfig solver;
  Case2Options dispatch;
  SweepConfig sweep;
  bool parallel = true;

  std::filesystem::path output_dir = "out";

  StudyConfig() { solver.log_elapsed = false; }

  StudySettings settings() const;
  /// Resolved configuration as INI text in a fixed key order. The output directory is left
  /// out so the same study yields the same hash wherever it is written.
  std::string canonical() const;
  /// fnv1a64 of canonical(), 16 hex digits.
  std::string hash() const;
};

std::string to_string(DataSource s);
std::string to_string(EnvelopeSource s);
std::string to_string(LinkLayout s);

/// `section.key=value` pairs applied on top of the file.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Reads an INI file (empty path: defaults only), applies overrides and validates. The
/// data directory defaults to $IRA_DATA_DIR, then to the config file's directory.
/// Throws ConfigError for unknown keys, bad values or unreadable files.
StudyConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});
StudyConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {},
                         const std::filesystem::path& base_dir = {});

/// Parses `a,b,c` or `start:stop:step` (inclusive stop). Throws ConfigError.
std::vector<double> parse_axis(const std::string& text);

/// Study inputs plus the dispatch series for the same hours.
struct StudyInputs {
  StudyData data;
  std::vector<double> demand_a, demand_b, wind;
  std::vector<CleaningReport> reports;
};

/// Synthetic generation or file ingestion, then date-range selection. Throws DataError
/// (missing files, empty horizon) and ConfigError.
StudyInputs load_inputs(const StudyConfig& config);

/// Case-2 instance over the inputs; grid A is BE, grid B is UK.
DispatchCase dispatch_case(const StudyConfig& config, const StudyInputs& inputs);

/// Replaces the flows with those of a market clearing over the inputs: the NEMO line for a
/// single link, the two island corridors for a hybrid layout.
void apply_dispatch_flows(const StudyConfig& config, StudyInputs& inputs, const DispatchResult& result);

}  // namespace ira
