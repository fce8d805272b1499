#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ira {

/// One interconnector path as seen from the battery.
///
/// Flow sign: positive means injection from grid A (Belgium) toward grid B (UK).
/// Charging the battery from grid B pushes flow in the negative direction; discharging
/// into grid B pushes it in the positive direction.
struct LinkState {
  double l_max = 0.0;         // MW
  std::vector<double> flow;   // MW per step
  double eta_line = 1.0;

  void validate() const;
};

/// Per-step admissible range for the grid-B exchange variable x_B (MWh per step).
struct OperatingEnvelope {
  std::vector<double> x_min_adj;
  std::vector<double> x_max_adj;

  std::size_t size() const { return x_min_adj.size(); }

  /// [x_min, x_max] at every step (no congestion).
  static OperatingEnvelope full(std::size_t steps, double x_min, double x_max);
  /// [0, 0] at every step (grid B unreachable).
  static OperatingEnvelope closed(std::size_t steps);

  /// Throws ParameterError unless x_min_adj <= 0 <= x_max_adj and the range sits inside [x_min, x_max].
  void validate(double x_min, double x_max) const;
};

OperatingEnvelope envelope_single_link(const LinkState& link, double x_min, double x_max);

/// Intersection of the BE-side and UK-side regions of a hybrid offshore asset.
OperatingEnvelope envelope_hoa(const LinkState& link_be, const LinkState& link_uk, double x_min, double x_max);

OperatingEnvelope intersect(const OperatingEnvelope& a, const OperatingEnvelope& b);

/// Firm transmission right of `reserved` MWh per step in both directions, clipped to the ramp box.
OperatingEnvelope reserve_capacity(const OperatingEnvelope& envelope, double reserved, double x_min, double x_max);

/// Writes `timestamp,x_min_adj,x_max_adj`. `timestamps` may be empty, in which case step indices are written.
void write_envelope_csv(const std::filesystem::path& path, const OperatingEnvelope& envelope,
                        std::span<const std::string> timestamps, const std::string& header_comment = {});

}  // namespace ira
