#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ira/metrics.hpp"
#include "ira/study.hpp"

namespace ira {

enum class SweepKind { Rent, Blocking, Reserved };

std::string to_string(SweepKind kind);
/// Accepts rent, blocking, reserved. Throws ConfigError.
SweepKind parse_sweep_kind(const std::string& text);

enum class Execution { Serial, Parallel };

/// One solved scenario at one axis point.
struct SweepCell {
  Metrics metrics;
  solver::LpStatus status = solver::LpStatus::Optimal;
  double gap = 0.0;
  std::size_t nodes = 0;
  double seconds = 0.0;
};

struct BlockingSelection {
  Scenario scenario = Scenario::C2;
  /// Empty when the curve has fewer than three points or an infinite SPP.
  std::optional<KneeSelection> m1;
  std::string m1_note;
  LifeSelection m2;
};

struct SweepResult {
  SweepKind kind = SweepKind::Rent;
  std::vector<double> axis;
  std::vector<Scenario> scenarios;
  /// cells[s][p]: scenario s at axis point p.
  std::vector<std::vector<SweepCell>> cells;

  /// Blocking sweeps.
  std::vector<BlockingSelection> selections;

  /// Reserved sweeps: C1 baseline and two readings of the gain.
  std::optional<Metrics> c1_baseline;
  /// 100 (R_C3(f) - R_C1) / |R_C1|.
  std::vector<double> increase_vs_c1;
  /// 100 (R_C3(f) - R_C3(0)) / |R_C1|; zero at fraction 0.
  std::vector<double> marginal_vs_zero;

  std::size_t points() const { return axis.size(); }
  /// Throws LookupError when the scenario is not part of the sweep.
  const std::vector<SweepCell>& column(Scenario s) const;
  std::vector<double> series(Scenario s, double Metrics::*field) const;
};

/// C1, C2 and C3 at every rent. Rents must be strictly increasing.
SweepResult sweep_rent(const StudyData& data, const StudySettings& settings, const std::vector<double>& rents,
                       Execution exec = Execution::Parallel);

/// The given scenarios at every blocking level, then M1 and M2 per scenario against the
/// battery calendar life. Throws ParameterError if a level exceeds b_max - b_min.
SweepResult sweep_blocking(const StudyData& data, const StudySettings& settings, const std::vector<double>& blocks,
                           const std::vector<Scenario>& scenarios = {Scenario::C2, Scenario::C3},
                           Execution exec = Execution::Parallel);

/// C3 at every reserved fraction of the ramp limit, compared with C1 at the same rent.
SweepResult sweep_reserved(const StudyData& data, const StudySettings& settings, const std::vector<double>& fractions,
                           Execution exec = Execution::Parallel);

/// Sample quantile with linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile(std::vector<double> sample, double p);

struct TimingResult {
  std::vector<double> seconds;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t limit_hits = 0;
};

/// Solves `runs` bootstrap resamples of the horizon (whole days drawn with replacement)
/// one after another and records the wall-clock time of each solve. Needs whole days.
TimingResult timing_harness(const StudyData& data, const StudySettings& settings, Scenario scenario, std::size_t runs,
                            std::uint64_t seed = 1);

/// One row per axis point; `# <header_comment>` first when given.
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result,
                     const std::string& header_comment = {});
/// Columns axis,scenario,metric,value.
void write_sweep_long_csv(const std::filesystem::path& path, const SweepResult& result,
                          const std::string& header_comment = {});
/// Selections, viability flags and reserved-gain columns.
std::string sweep_summary_json(const SweepResult& result, const std::string& config_hash = {});

}  // namespace ira
