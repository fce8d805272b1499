#include "ira/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ira/error.hpp"
#include "ira/io_util.hpp"

namespace ira {

namespace {

void require_ramp_box(double x_min, double x_max) {
  if (!(x_min < 0.0 && 0.0 < x_max)) throw ParameterError("envelope: requires X_min < 0 < X_max");
}

double upper_side(double l_max, double flow, double x_max) {
  return flow < 0.0 ? std::max(0.0, std::min(x_max, l_max + flow)) : x_max;
}

double lower_side(double l_max, double flow, double x_min) {
  return flow < 0.0 ? x_min : std::min(0.0, std::max(x_min, -l_max + flow));
}

}  // namespace

void LinkState::validate() const {
  if (!(std::abs(l_max) > 0.0) || !std::isfinite(l_max)) throw ParameterError("LinkState: line capacity must be nonzero");
  if (!(eta_line > 0.0 && eta_line <= 1.0)) throw ParameterError("LinkState: eta_line must lie in (0, 1]");
  for (double f : flow) {
    if (!std::isfinite(f)) throw DataError("LinkState: non-finite flow value");
  }
}

OperatingEnvelope OperatingEnvelope::full(std::size_t steps, double x_min, double x_max) {
  return {std::vector<double>(steps, x_min), std::vector<double>(steps, x_max)};
}

OperatingEnvelope OperatingEnvelope::closed(std::size_t steps) {
  return {std::vector<double>(steps, 0.0), std::vector<double>(steps, 0.0)};
}

void OperatingEnvelope::validate(double x_min, double x_max) const {
  if (x_min_adj.size() != x_max_adj.size()) throw ShapeError("OperatingEnvelope: bound series differ in length");
  constexpr double tol = 1e-12;
  for (std::size_t i = 0; i < x_min_adj.size(); ++i) {
    if (!(x_min_adj[i] <= tol && x_max_adj[i] >= -tol)) {
      throw ParameterError("OperatingEnvelope: step " + std::to_string(i) + " does not contain 0");
    }
    if (x_min_adj[i] < x_min - tol || x_max_adj[i] > x_max + tol) {
      throw ParameterError("OperatingEnvelope: step " + std::to_string(i) + " exceeds the ramp box");
    }
  }
}

OperatingEnvelope envelope_single_link(const LinkState& link, double x_min, double x_max) {
  require_ramp_box(x_min, x_max);
  link.validate();
  const double l_max = std::abs(link.l_max);
  OperatingEnvelope env;
  env.x_min_adj.reserve(link.flow.size());
  env.x_max_adj.reserve(link.flow.size());
  for (double f : link.flow) {
    env.x_max_adj.push_back(upper_side(l_max, f, x_max));
    env.x_min_adj.push_back(lower_side(l_max, f, x_min));
  }
  return env;
}

OperatingEnvelope envelope_hoa(const LinkState& link_be, const LinkState& link_uk, double x_min, double x_max) {
  if (link_be.flow.size() != link_uk.flow.size()) throw ShapeError("envelope_hoa: flow series differ in length");
  return intersect(envelope_single_link(link_be, x_min, x_max), envelope_single_link(link_uk, x_min, x_max));
}

OperatingEnvelope intersect(const OperatingEnvelope& a, const OperatingEnvelope& b) {
  if (a.size() != b.size()) throw ShapeError("intersect: envelopes differ in length");
  OperatingEnvelope out;
  out.x_min_adj.resize(a.size());
  out.x_max_adj.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.x_min_adj[i] = std::max(a.x_min_adj[i], b.x_min_adj[i]);
    out.x_max_adj[i] = std::min(a.x_max_adj[i], b.x_max_adj[i]);
  }
  return out;
}

OperatingEnvelope reserve_capacity(const OperatingEnvelope& envelope, double reserved, double x_min, double x_max) {
  require_ramp_box(x_min, x_max);
  if (!(reserved >= 0.0)) throw ParameterError("reserve_capacity: reserved capacity must be nonnegative");
  if (reserved > std::max(-x_min, x_max) + 1e-12) {
    throw ParameterError("reserve_capacity: reservation exceeds the battery ramp limit");
  }
  OperatingEnvelope out = envelope;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.x_max_adj[i] = std::min(x_max, std::max(out.x_max_adj[i], reserved));
    out.x_min_adj[i] = std::max(x_min, std::min(out.x_min_adj[i], -reserved));
  }
  return out;
}

void write_envelope_csv(const std::filesystem::path& path, const OperatingEnvelope& envelope,
                        std::span<const std::string> timestamps, const std::string& header_comment) {
  if (!timestamps.empty() && timestamps.size() != envelope.size()) {
    throw ShapeError("write_envelope_csv: timestamp count differs from envelope length");
  }
  std::ofstream out(path);
  if (!out) throw DataError("write_envelope_csv: cannot open " + path.string());
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "timestamp,x_min_adj,x_max_adj\n";
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    out << (timestamps.empty() ? std::to_string(i) : timestamps[i]) << ',' << format_double(envelope.x_min_adj[i])
        << ',' << format_double(envelope.x_max_adj[i]) << '\n';
  }
}

}  // namespace ira
