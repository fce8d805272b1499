#include "ira/analytics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <random>

#include <json.hpp>

#include "ira/error.hpp"
#include "ira/io_util.hpp"

namespace ira {

namespace {

void require_increasing(const std::vector<double>& axis, const char* what) {
  if (axis.empty()) throw ParameterError(std::string(what) + ": empty axis");
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) throw ParameterError(std::string(what) + ": axis must be strictly increasing");
  }
}

std::string axis_label(SweepKind kind) {
  switch (kind) {
    case SweepKind::Rent: return "rent";
    case SweepKind::Blocking: return "b_block";
    case SweepKind::Reserved: return "reserved_fraction";
  }
  return "axis";
}

// Re-raises with the failing point in the message, keeping the error category.
[[noreturn]] void rethrow_at(std::exception_ptr e, const std::string& where) {
  try {
    std::rethrow_exception(e);
  } catch (const InfeasibleError& x) {
    throw InfeasibleError(where + ": " + x.what());
  } catch (const ParameterError& x) {
    throw ParameterError(where + ": " + x.what());
  } catch (const ConfigError& x) {
    throw ConfigError(where + ": " + x.what());
  } catch (const SolverInconsistencyError& x) {
    throw SolverInconsistencyError(where + ": " + x.what());
  } catch (const std::exception& x) {
    throw Error(where + ": " + x.what());
  }
}

using SettingsAt = StudySettings (*)(const StudySettings&, double);

StudySettings at_rent(const StudySettings& s, double v) {
  auto out = s;
  out.rent = v;
  return out;
}

StudySettings at_block(const StudySettings& s, double v) {
  auto out = s;
  out.b_block = v;
  return out;
}

StudySettings at_fraction(const StudySettings& s, double v) {
  auto out = s;
  out.reserved_fraction = v;
  return out;
}

SweepCell solve_cell(const StudyData& data, const StudySettings& settings, Scenario scenario) {
  const auto r = run_scenario(data, settings, scenario);
  SweepCell c;
  c.metrics = r.metrics;
  c.status = r.solution.status;
  if (!r.search.has_incumbent) c.status = r.search.status;
  c.gap = r.search.gap;
  c.nodes = r.search.nodes;
  c.seconds = r.seconds;
  return c;
}

// Fills cells[s][p] for every scenario and axis point. Tasks are independent; results land
// in fixed slots so the output does not depend on the schedule.
void run_grid(SweepResult& result, const StudyData& data, const StudySettings& settings, SettingsAt at,
              Execution exec) {
  const std::size_t ns = result.scenarios.size(), np = result.axis.size();
  result.cells.assign(ns, std::vector<SweepCell>(np));
  std::vector<std::exception_ptr> errors(ns * np);
  const auto tasks = static_cast<std::ptrdiff_t>(ns * np);
  auto work = [&](std::ptrdiff_t t) {
    const auto s = static_cast<std::size_t>(t) / np, p = static_cast<std::size_t>(t) % np;
    try {
      result.cells[s][p] = solve_cell(data, at(settings, result.axis[p]), result.scenarios[s]);
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < tasks; ++t) work(t);
  } else {
    for (std::ptrdiff_t t = 0; t < tasks; ++t) work(t);
  }
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t s = 0; s < ns; ++s) {
      if (errors[s * np + p]) {
        rethrow_at(errors[s * np + p], axis_label(result.kind) + "=" + format_double(result.axis[p]) + " " +
                                            to_string(result.scenarios[s]));
      }
    }
  }
}

nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::Rent: return "rent";
    case SweepKind::Blocking: return "blocking";
    case SweepKind::Reserved: return "reserved";
  }
  return "?";
}

SweepKind parse_sweep_kind(const std::string& text) {
  if (text == "rent") return SweepKind::Rent;
  if (text == "blocking") return SweepKind::Blocking;
  if (text == "reserved") return SweepKind::Reserved;
  throw ConfigError("unknown sweep kind '" + text + "' (expected rent, blocking or reserved)");
}

const std::vector<SweepCell>& SweepResult::column(Scenario s) const {
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    if (scenarios[i] == s) return cells[i];
  }
  throw LookupError("sweep has no scenario " + to_string(s));
}

std::vector<double> SweepResult::series(Scenario s, double Metrics::*field) const {
  std::vector<double> out;
  for (const auto& c : column(s)) out.push_back(c.metrics.*field);
  return out;
}

SweepResult sweep_rent(const StudyData& data, const StudySettings& settings, const std::vector<double>& rents,
                       Execution exec) {
  require_increasing(rents, "sweep_rent");
  SweepResult r;
  r.kind = SweepKind::Rent;
  r.axis = rents;
  r.scenarios = {Scenario::C1, Scenario::C2, Scenario::C3};
  run_grid(r, data, settings, at_rent, exec);
  return r;
}

SweepResult sweep_blocking(const StudyData& data, const StudySettings& settings, const std::vector<double>& blocks,
                           const std::vector<Scenario>& scenarios, Execution exec) {
  require_increasing(blocks, "sweep_blocking");
  if (scenarios.empty()) throw ParameterError("sweep_blocking: no scenarios");
  for (double b : blocks) make_blocking(settings.battery, b, settings.split);
  SweepResult r;
  r.kind = SweepKind::Blocking;
  r.axis = blocks;
  r.scenarios = scenarios;
  run_grid(r, data, settings, at_block, exec);
  for (const auto s : scenarios) {
    BlockingSelection sel;
    sel.scenario = s;
    const auto spp = r.series(s, &Metrics::spp);
    const bool finite = std::all_of(spp.begin(), spp.end(), [](double v) { return std::isfinite(v); });
    if (spp.size() < 3) {
      sel.m1_note = "fewer than three sweep points";
    } else if (!finite) {
      sel.m1_note = "SPP is infinite on part of the curve";
    } else {
      sel.m1 = select_blocking_m1(blocks, spp);
    }
    sel.m2 = select_blocking_m2(blocks, spp, settings.battery.calendar_life);
    r.selections.push_back(sel);
  }
  return r;
}

SweepResult sweep_reserved(const StudyData& data, const StudySettings& settings, const std::vector<double>& fractions,
                           Execution exec) {
  require_increasing(fractions, "sweep_reserved");
  if (fractions.front() < 0.0 || fractions.back() > 1.0) {
    throw ParameterError("sweep_reserved: fractions must lie in [0, 1]");
  }
  SweepResult r;
  r.kind = SweepKind::Reserved;
  r.axis = fractions;
  r.scenarios = {Scenario::C3};
  run_grid(r, data, settings, at_fraction, exec);
  SweepCell base;
  try {
    base = solve_cell(data, settings, Scenario::C1);
  } catch (...) {
    rethrow_at(std::current_exception(), "reserved baseline C1");
  }
  r.c1_baseline = base.metrics;
  const double r1 = base.metrics.revenue;
  const double scale = std::abs(r1);
  const auto rev = r.series(Scenario::C3, &Metrics::revenue);
  for (double v : rev) {
    r.increase_vs_c1.push_back(scale > 0.0 ? 100.0 * (v - r1) / scale : std::numeric_limits<double>::quiet_NaN());
    r.marginal_vs_zero.push_back(scale > 0.0 ? 100.0 * (v - rev.front()) / scale
                                             : std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

double quantile(std::vector<double> sample, double p) {
  if (sample.empty()) throw ParameterError("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("quantile: p must lie in [0, 1]");
  std::sort(sample.begin(), sample.end());
  const double h = p * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

TimingResult timing_harness(const StudyData& data, const StudySettings& settings, Scenario scenario, std::size_t runs,
                            std::uint64_t seed) {
  if (runs == 0) throw ParameterError("timing_harness: runs must be at least 1");
  data.validate();
  const double steps_per_day_f = 24.0 / settings.battery.h;
  const auto steps_per_day = static_cast<std::size_t>(std::llround(steps_per_day_f));
  if (steps_per_day == 0 || std::abs(steps_per_day_f - static_cast<double>(steps_per_day)) > 1e-9 ||
      data.size() % steps_per_day != 0 || data.size() == 0) {
    throw ParameterError("timing_harness: horizon must cover whole days");
  }
  const std::size_t days = data.size() / steps_per_day;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, days - 1);
  TimingResult t;
  for (std::size_t run = 0; run < runs; ++run) {
    StudyData sample;
    for (std::size_t d = 0; d < days; ++d) {
      const auto day = data.slice(pick(rng) * steps_per_day, steps_per_day);
      auto append = [](std::vector<double>& to, const std::vector<double>& from) {
        to.insert(to.end(), from.begin(), from.end());
      };
      append(sample.price_a, day.price_a);
      append(sample.price_b, day.price_b);
      append(sample.flow, day.flow);
      append(sample.flow_b_side, day.flow_b_side);
    }
    const auto start = std::chrono::steady_clock::now();
    const auto r = run_scenario(sample, settings, scenario);
    t.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (r.search.status == solver::LpStatus::Limit) ++t.limit_hits;
  }
  t.median = quantile(t.seconds, 0.5);
  t.q1 = quantile(t.seconds, 0.25);
  t.q3 = quantile(t.seconds, 0.75);
  t.min = *std::min_element(t.seconds.begin(), t.seconds.end());
  t.max = *std::max_element(t.seconds.begin(), t.seconds.end());
  return t;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result, const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw DataError("write_sweep_csv: cannot open " + path.string());
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << axis_label(result.kind);
  for (const auto s : result.scenarios) {
    const auto p = to_string(s);
    out << ',' << p << "_revenue," << p << "_annual_revenue," << p << "_cycles," << p << "_annual_cycles," << p
        << "_spp," << p << "_cycles_to_payback," << p << "_viable," << p << "_status";
  }
  if (result.kind == SweepKind::Reserved) out << ",increase_vs_c1_pct,marginal_vs_zero_pct";
  out << '\n';
  for (std::size_t i = 0; i < result.points(); ++i) {
    out << format_double(result.axis[i]);
    for (const auto& col : result.cells) {
      const auto& c = col[i];
      const auto& m = c.metrics;
      out << ',' << format_double(m.revenue) << ',' << format_double(m.annual_revenue) << ','
          << format_double(m.cycles) << ',' << format_double(m.annual_cycles) << ',' << format_double(m.spp) << ','
          << format_double(m.cycles_to_payback) << ',' << (m.viable ? 1 : 0) << ',' << solver::to_string(c.status);
    }
    if (result.kind == SweepKind::Reserved) {
      out << ',' << format_double(result.increase_vs_c1[i]) << ',' << format_double(result.marginal_vs_zero[i]);
    }
    out << '\n';
  }
}

void write_sweep_long_csv(const std::filesystem::path& path, const SweepResult& result,
                          const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw DataError("write_sweep_long_csv: cannot open " + path.string());
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "axis,scenario,metric,value\n";
  const std::pair<const char*, double Metrics::*> fields[] = {
      {"revenue", &Metrics::revenue},       {"annual_revenue", &Metrics::annual_revenue},
      {"cycles", &Metrics::cycles},         {"annual_cycles", &Metrics::annual_cycles},
      {"spp", &Metrics::spp},               {"cycles_to_payback", &Metrics::cycles_to_payback}};
  for (std::size_t i = 0; i < result.points(); ++i) {
    for (std::size_t s = 0; s < result.scenarios.size(); ++s) {
      const auto& m = result.cells[s][i].metrics;
      for (const auto& [name, field] : fields) {
        out << format_double(result.axis[i]) << ',' << to_string(result.scenarios[s]) << ',' << name << ','
            << format_double(m.*field) << '\n';
      }
    }
  }
}

std::string sweep_summary_json(const SweepResult& result, const std::string& config_hash) {
  nlohmann::json j;
  j["kind"] = to_string(result.kind);
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  j["axis"] = result.axis;
  j["axis_name"] = axis_label(result.kind);
  nlohmann::json scen = nlohmann::json::object();
  for (std::size_t s = 0; s < result.scenarios.size(); ++s) {
    nlohmann::json viable = nlohmann::json::array(), status = nlohmann::json::array();
    for (const auto& c : result.cells[s]) {
      viable.push_back(c.metrics.viable);
      status.push_back(solver::to_string(c.status));
    }
    scen[to_string(result.scenarios[s])] = {{"viable", viable}, {"status", status}};
  }
  j["scenarios"] = scen;
  if (result.kind == SweepKind::Blocking) {
    nlohmann::json sel = nlohmann::json::object();
    for (const auto& b : result.selections) {
      nlohmann::json e;
      if (b.m1) {
        e["m1"] = {{"b_block", b.m1->b_block}, {"index", b.m1->index}, {"no_knee", b.m1->no_knee}};
      } else {
        e["m1"] = nullptr;
        e["m1_note"] = b.m1_note;
      }
      e["m2"] = {{"b_block", b.m2.b_block}, {"not_viable", b.m2.not_viable}, {"ambiguous", b.m2.ambiguous}};
      if (b.m1 && !b.m1->no_knee && !b.m2.not_viable) e["m1_le_m2"] = b.m1->b_block <= b.m2.b_block + 1e-12;
      sel[to_string(b.scenario)] = e;
    }
    j["selections"] = sel;
  }
  if (result.kind == SweepKind::Reserved) {
    nlohmann::json inc = nlohmann::json::array(), marg = nlohmann::json::array();
    for (double v : result.increase_vs_c1) inc.push_back(num(v));
    for (double v : result.marginal_vs_zero) marg.push_back(num(v));
    j["c1_revenue"] = result.c1_baseline ? num(result.c1_baseline->revenue) : nlohmann::json(nullptr);
    j["increase_vs_c1_pct"] = inc;
    j["marginal_vs_zero_pct"] = marg;
  }
  return j.dump(2);
}

}  // namespace ira
