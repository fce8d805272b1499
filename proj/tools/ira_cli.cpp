// Command-line front end: solve, sweep, dispatch, clean-data, export-mps, synth, timing.
//
// Exit codes: 0 optimal, 2 infeasible, 3 node/time limit, 4 config or data error, 1 other failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ira/analytics.hpp"
#include "ira/config.hpp"
#include "ira/data_ingest.hpp"
#include "ira/dispatch.hpp"
#include "ira/error.hpp"
#include "ira/io_util.hpp"
#include "ira/solver/mps.hpp"
#include "ira/study.hpp"
#include "ira/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitLimit = 3;
constexpr int kExitConfig = 4;

struct CommonOptions {
  std::string config;
  std::string scenario, from, to, out, data_dir;
  std::optional<double> rent, block;
  std::vector<std::string> set;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config, "INI study configuration")->check(CLI::ExistingFile);
  cmd->add_option("--scenario", o.scenario, "C1, C2, C3 or K1");
  cmd->add_option("--from", o.from, "first UTC day, YYYY-MM-DD");
  cmd->add_option("--to", o.to, "last UTC day, YYYY-MM-DD");
  cmd->add_option("--rent", o.rent, "interconnector rent, EUR/MWh");
  cmd->add_option("--block", o.block, "blocked capacity b_block, MWh");
  cmd->add_option("-o,--out", o.out, "output directory");
  cmd->add_option("--data-dir", o.data_dir, "base directory for data files (default $IRA_DATA_DIR)");
  cmd->add_option("--set", o.set, "extra section.key=value override")->take_all();
}

ira::StudyConfig load(const CommonOptions& o) {
  ira::ConfigOverrides ov;
  if (!o.scenario.empty()) ov.emplace_back("study.scenario", o.scenario);
  if (!o.from.empty()) ov.emplace_back("data.start", o.from);
  if (!o.to.empty()) ov.emplace_back("data.end", o.to);
  if (o.rent) ov.emplace_back("market.rent", ira::format_double(*o.rent));
  if (o.block) ov.emplace_back("study.b_block", ira::format_double(*o.block));
  if (!o.out.empty()) ov.emplace_back("output.dir", o.out);
  if (!o.data_dir.empty()) ov.emplace_back("data.dir", o.data_dir);
  for (const auto& s : o.set) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ira::ConfigError("--set expects section.key=value, got '" + s + "'");
    ov.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return ira::load_config(o.config, ov);
}

std::string stamp(const std::string& hash) { return "config_hash=" + hash; }

fs::path prepare_out(const fs::path& dir) {
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ira::DataError("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json metrics_json(const ira::Metrics& m) {
  return {{"days", m.days},
          {"revenue", m.revenue},
          {"annual_revenue", m.annual_revenue},
          {"cycles", m.cycles},
          {"annual_cycles", m.annual_cycles},
          {"spp", num(m.spp)},
          {"cycles_to_payback", num(m.cycles_to_payback)},
          {"viable", m.viable},
          {"uf", num(m.uf)}};
}

int status_exit(ira::solver::LpStatus s) {
  switch (s) {
    case ira::solver::LpStatus::Optimal: return kExitOk;
    case ira::solver::LpStatus::Infeasible: return kExitInfeasible;
    case ira::solver::LpStatus::Limit: return kExitLimit;
    case ira::solver::LpStatus::Unbounded: return kExitFailure;
  }
  return kExitFailure;
}

ira::DispatchResult clear(const ira::StudyConfig& cfg, const ira::DispatchCase& c) {
  return cfg.parallel ? ira::clear_market(c) : ira::clear_market_serial(c);
}

// Lists every hour that cannot be served, then rethrows.
[[noreturn]] void report_unservable(const ira::DispatchCase& c, const ira::InfeasibleError& first) {
  std::vector<std::size_t> bad;
  for (std::size_t h = 0; h < c.hours(); ++h) {
    try {
      ira::clear_market_serial(c, h, h + 1);
    } catch (const ira::InfeasibleError&) {
      bad.push_back(h);
    }
  }
  std::cerr << "unservable hours:";
  for (auto h : bad) std::cerr << ' ' << h;
  std::cerr << '\n';
  throw first;
}

ira::StudyInputs inputs_for(const ira::StudyConfig& cfg, bool need_flows) {
  auto in = ira::load_inputs(cfg);
  if (need_flows && cfg.envelope_source == ira::EnvelopeSource::Dispatch) {
    const auto c = ira::dispatch_case(cfg, in);
    try {
      ira::apply_dispatch_flows(cfg, in, clear(cfg, c));
    } catch (const ira::InfeasibleError& e) {
      report_unservable(c, e);
    }
  }
  return in;
}

int cmd_solve(const CommonOptions& o) {
  auto cfg = load(o);
  const auto hash = cfg.hash();
  const auto in = inputs_for(cfg, cfg.scenario == ira::Scenario::C3);
  const auto out = prepare_out(cfg.output_dir);

  std::ofstream log(out / "solver.log");
  if (!log) throw ira::DataError("cannot write " + (out / "solver.log").string());
  log << "# " << stamp(hash) << "\n# node, bound, incumbent, gap, time\n";
  auto settings = cfg.settings();
  settings.solver.log = &log;

  const auto r = ira::run_scenario(in.data, settings, cfg.scenario);
  log.close();
  const bool has_solution = r.search.has_incumbent;
  if (has_solution) {
    ira::write_solution_csv(out / "trajectory.csv", r.solution, stamp(hash));
    ira::write_envelope_csv(out / "envelope.csv", r.envelope, in.data.timestamps, stamp(hash));
  }

  json j;
  j["config_hash"] = hash;
  j["scenario"] = ira::to_string(cfg.scenario);
  j["status"] = ira::solver::to_string(r.search.status);
  j["steps"] = in.data.size();
  if (!in.data.timestamps.empty()) {
    j["first"] = in.data.timestamps.front();
    j["last"] = in.data.timestamps.back();
  }
  if (has_solution) {
    j["objective"] = r.solution.objective;
    j["metrics"] = metrics_json(r.metrics);
  }
  if (r.split) {
    j["revenue_split"] = {{"revenue_a", r.split->revenue_a}, {"revenue_b", r.split->revenue_b},
                          {"bought_a", r.split->bought_a},   {"sold_a", r.split->sold_a},
                          {"bought_b", r.split->bought_b},   {"sold_b", r.split->sold_b}};
  }
  j["solver"] = {{"nodes", r.search.nodes},
                 {"lp_iterations", r.search.lp_iterations},
                 {"best_bound", num(r.search.best_bound)},
                 {"gap", num(r.search.gap)},
                 {"root_objective", num(r.search.root_objective)}};
  write_text(out / "metrics.json", j.dump(2));

  std::cout << ira::to_string(cfg.scenario) << ' ' << ira::solver::to_string(r.search.status);
  if (has_solution) {
    std::cout << " revenue=" << r.metrics.revenue << " cycles=" << r.metrics.cycles << " spp=" << r.metrics.spp;
  }
  std::cout << " nodes=" << r.search.nodes << " seconds=" << r.seconds << " -> " << out.string() << '\n';
  return status_exit(r.search.status);
}

std::vector<double> default_axis(ira::SweepKind kind, const ira::StudyConfig& cfg) {
  switch (kind) {
    case ira::SweepKind::Rent: return ira::parse_axis("0:30:1");
    case ira::SweepKind::Blocking: {
      std::vector<double> v;
      const double band = cfg.battery.b_max - cfg.battery.b_min;
      for (int i = 0; 0.1 * i <= band + 1e-9; ++i) {
        const double b = std::round(1e9 * 0.1 * i) / 1e9;
        const auto spec = ira::make_blocking(cfg.battery, b, cfg.split);
        if (cfg.battery.b0 < spec.b_min_prime - 1e-12 || cfg.battery.b0 > spec.b_max_prime + 1e-12) break;
        v.push_back(b);
      }
      return v;
    }
    case ira::SweepKind::Reserved: return {0.0, 0.25, 0.5, 0.75, 1.0};
  }
  return {};
}

int cmd_sweep(CommonOptions o, const std::string& kind_text, const std::string& values,
              const std::string& scenarios_text) {
  if (!kind_text.empty()) o.set.push_back("sweep.kind=" + kind_text);
  if (!values.empty()) o.set.push_back("sweep.values=" + values);
  const auto cfg = load(o);
  const auto hash = cfg.hash();
  const auto kind = cfg.sweep.kind;
  const bool needs_c3 = kind != ira::SweepKind::Blocking || scenarios_text.find("C3") != std::string::npos ||
                        scenarios_text.empty();
  const auto in = inputs_for(cfg, needs_c3);
  const auto axis = cfg.sweep.values.empty() ? default_axis(kind, cfg) : cfg.sweep.values;
  const auto exec = cfg.parallel ? ira::Execution::Parallel : ira::Execution::Serial;
  const auto settings = cfg.settings();

  ira::SweepResult r;
  switch (kind) {
    case ira::SweepKind::Rent:
      r = ira::sweep_rent(in.data, settings, axis, exec);
      break;
    case ira::SweepKind::Blocking: {
      std::vector<ira::Scenario> scen{ira::Scenario::C2, ira::Scenario::C3};
      if (!scenarios_text.empty()) {
        scen.clear();
        std::stringstream ss(scenarios_text);
        for (std::string s; std::getline(ss, s, ',');) scen.push_back(ira::parse_scenario(s));
      }
      r = ira::sweep_blocking(in.data, settings, axis, scen, exec);
      break;
    }
    case ira::SweepKind::Reserved:
      r = ira::sweep_reserved(in.data, settings, axis, exec);
      break;
  }

  const auto out = prepare_out(cfg.output_dir);
  const auto base = "sweep_" + ira::to_string(kind);
  ira::write_sweep_csv(out / (base + ".csv"), r, stamp(hash));
  ira::write_sweep_long_csv(out / (base + "_long.csv"), r, stamp(hash));
  write_text(out / (base + ".json"), ira::sweep_summary_json(r, hash));

  int code = kExitOk;
  for (const auto& col : r.cells) {
    for (const auto& c : col) code = std::max(code, status_exit(c.status));
  }
  std::cout << base << ": " << r.points() << " points x " << r.scenarios.size() << " scenarios -> " << out.string()
            << '\n';
  return code;
}

int cmd_dispatch(const CommonOptions& o) {
  const auto cfg = load(o);
  const auto hash = cfg.hash();
  const auto in = ira::load_inputs(cfg);
  const auto c = ira::dispatch_case(cfg, in);
  ira::DispatchResult r;
  try {
    r = clear(cfg, c);
  } catch (const ira::InfeasibleError& e) {
    report_unservable(c, e);
  }
  const auto out = prepare_out(cfg.output_dir);
  ira::write_dispatch_csv(out / "dispatch.csv", r, in.data.timestamps, stamp(hash));

  auto write_flow = [&](const std::string& name, const std::vector<double>& v) {
    std::ofstream f(out / name);
    if (!f) throw ira::DataError("cannot write " + (out / name).string());
    f << "# " << stamp(hash) << "\ntimestamp,value\n";
    for (std::size_t h = 0; h < v.size(); ++h) f << in.data.timestamps[h] << ',' << ira::format_double(v[h]) << '\n';
  };
  write_flow("flow_nemo.csv", ira::extract_flows(r, ira::kLineNemo));
  const auto hoa = ira::extract_hoa_flows(r);
  write_flow("flow_be_side.csv", hoa.be_side);
  write_flow("flow_uk_side.csv", hoa.uk_side);

  std::size_t tied = 0;
  for (bool t : r.tied) tied += t ? 1 : 0;
  json j{{"config_hash", hash},
         {"hours", r.hours()},
         {"total_cost", r.total_cost},
         {"max_balance_residual", r.max_balance_residual},
         {"max_complementarity", r.max_complementarity},
         {"max_dual_infeasibility", r.max_dual_infeasibility},
         {"tied_hours", tied}};
  write_text(out / "dispatch.json", j.dump(2));
  std::cout << "dispatch: " << r.hours() << " hours, cost " << r.total_cost << " -> " << out.string() << '\n';
  return kExitOk;
}

int cmd_clean(const std::string& input, const std::string& unit_text, const std::string& name,
              const std::string& output) {
  const auto unit = ira::parse_unit(unit_text);
  std::ifstream raw(input, std::ios::binary);
  if (!raw) throw ira::DataError("cannot read " + input);
  std::stringstream bytes;
  bytes << raw.rdbuf();
  const auto hash = ira::hex64(ira::fnv1a64("clean-data\nunit=" + ira::to_string(unit) + "\nname=" + name + "\n" +
                                            bytes.str()));
  const ira::SeriesSchema schema{name, unit};
  ira::CleaningReport report;
  const auto clean = ira::is_price(unit) ? ira::ingest_price_series(input, schema, &report)
                                         : ira::clean_series(ira::load_series(input, schema), &report);
  const fs::path out = output.empty() ? fs::path(input).replace_extension(".clean.csv") : fs::path(output);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  ira::write_clean_csv(out, clean, stamp(hash));
  auto rep = json::parse(report.to_json());
  rep["config_hash"] = hash;
  rep["output_unit"] = ira::to_string(clean.unit);
  fs::path rep_path = out;
  rep_path.replace_extension(".report.json");
  write_text(rep_path, rep.dump(2));
  std::cout << name << ": " << report.retained_days << " days kept, " << report.dropped_days << " dropped, "
            << report.interpolated_hours << " interpolated, " << report.clamped_hours << " clamped -> " << out.string()
            << '\n';
  return kExitOk;
}

int cmd_export_mps(const CommonOptions& o, bool compact) {
  const auto cfg = load(o);
  const auto hash = cfg.hash();
  const auto in = inputs_for(cfg, cfg.scenario == ira::Scenario::C3);
  const auto problem = ira::scenario_problem(in.data, cfg.settings(), cfg.scenario);
  const auto out = prepare_out(cfg.output_dir);
  const auto path = out / (ira::to_string(cfg.scenario) + (compact ? "_compact" : "") + ".mps");
  std::ofstream f(path);
  if (!f) throw ira::DataError("cannot write " + path.string());
  f << "* " << stamp(hash) << '\n';
  ira::solver::write_mps(compact ? ira::compact_view(problem) : problem.milp, f, "IRA" + ira::to_string(cfg.scenario));
  std::cout << path.string() << '\n';
  return kExitOk;
}

int cmd_synth(const CommonOptions& o) {
  const auto cfg = load(o);
  const auto hash = cfg.hash();
  const auto d = ira::make_synthetic(cfg.data.synthetic);
  const auto out = prepare_out(cfg.output_dir);
  auto write = [&](const std::string& name, const std::vector<double>& v) {
    std::ofstream f(out / name);
    if (!f) throw ira::DataError("cannot write " + (out / name).string());
    f << "# " << stamp(hash) << "\ntimestamp,value\n";
    for (std::size_t h = 0; h < v.size(); ++h) f << d.timestamps[h] << ',' << ira::format_double(v[h]) << '\n';
  };
  write("price_a.csv", d.price_a);
  write("price_b.csv", d.price_b);
  write("flow.csv", d.flow);
  write("demand_a.csv", d.demand_a);
  write("demand_b.csv", d.demand_b);
  write("wind.csv", d.wind);
  write_text(out / "study.ini",
             "# " + stamp(hash) +
                 "\n[data]\nsource = files\nprice_a = price_a.csv\nprice_b = price_b.csv\nprice_b_unit = EUR/MWh\n"
                 "flow = flow.csv\ndemand_a = demand_a.csv\ndemand_b = demand_b.csv\nwind = wind.csv\n");
  std::cout << "synthetic: " << d.size() << " hours -> " << out.string() << '\n';
  return kExitOk;
}

int cmd_timing(const CommonOptions& o, std::size_t runs, std::uint64_t seed) {
  const auto cfg = load(o);
  const auto hash = cfg.hash();
  const auto in = inputs_for(cfg, cfg.scenario == ira::Scenario::C3);
  const auto t = ira::timing_harness(in.data, cfg.settings(), cfg.scenario, runs, seed);
  const auto out = prepare_out(cfg.output_dir);
  json j{{"config_hash", hash}, {"scenario", ira::to_string(cfg.scenario)},
         {"runs", runs},        {"seed", seed},
         {"median", t.median},  {"q1", t.q1},
         {"q3", t.q3},          {"min", t.min},
         {"max", t.max},        {"limit_hits", t.limit_hits},
         {"seconds", t.seconds}};
  write_text(out / "timing.json", j.dump(2));
  std::cout << "timing: median " << t.median << " s, IQR [" << t.q1 << ", " << t.q3 << "] over " << runs
            << " runs\n";
  return t.limit_hits > 0 ? kExitLimit : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inter-regional battery arbitrage studies"};
  app.require_subcommand(1);

  CommonOptions solve_o, sweep_o, dispatch_o, mps_o, synth_o, timing_o;

  auto* solve = app.add_subcommand("solve", "solve one scenario and write trajectory, metrics and solver log");
  add_common(solve, solve_o);

  auto* sweep = app.add_subcommand("sweep", "rent, blocking or reserved-capacity sweep");
  add_common(sweep, sweep_o);
  std::string sweep_kind, sweep_values, sweep_scenarios;
  sweep->add_option("--kind", sweep_kind, "rent, blocking or reserved");
  sweep->add_option("--values", sweep_values, "axis as a,b,c or start:stop:step");
  sweep->add_option("--scenarios", sweep_scenarios, "blocking sweep scenarios, e.g. C2,C3");

  auto* dispatch = app.add_subcommand("dispatch", "clear the three-node island market hour by hour");
  add_common(dispatch, dispatch_o);

  auto* clean = app.add_subcommand("clean-data", "clean one timestamp,value CSV");
  std::string clean_in, clean_unit = "EUR/MWh", clean_name = "series", clean_out;
  clean->add_option("input", clean_in, "input CSV")->required()->check(CLI::ExistingFile);
  clean->add_option("--unit", clean_unit, "EUR/MWh, GBP/MWh, MW or MWh");
  clean->add_option("--name", clean_name, "series name for the report");
  clean->add_option("-o,--out", clean_out, "output CSV (default <input>.clean.csv)");

  auto* mps = app.add_subcommand("export-mps", "write the scenario MILP in fixed MPS format");
  add_common(mps, mps_o);
  bool compact = false;
  mps->add_flag("--compact", compact, "write the prefix-sum form instead of the triangular form");

  auto* synth = app.add_subcommand("synth", "write the synthetic dataset as CSV files plus a study.ini");
  add_common(synth, synth_o);

  auto* timing = app.add_subcommand("timing", "bootstrap timing of one scenario");
  add_common(timing, timing_o);
  std::size_t runs = 20;
  std::uint64_t seed = 1;
  timing->add_option("--runs", runs, "number of resampled solves")->check(CLI::PositiveNumber);
  timing->add_option("--seed", seed, "resampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(solve_o);
    if (*sweep) return cmd_sweep(sweep_o, sweep_kind, sweep_values, sweep_scenarios);
    if (*dispatch) return cmd_dispatch(dispatch_o);
    if (*clean) return cmd_clean(clean_in, clean_unit, clean_name, clean_out);
    if (*mps) return cmd_export_mps(mps_o, compact);
    if (*synth) return cmd_synth(synth_o);
    if (*timing) return cmd_timing(timing_o, runs, seed);
  } catch (const ira::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ira::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ira::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ira::ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ira::OrderingError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ira::SchemaError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ira::UnitError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ira::ShapeError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ira::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ira::LookupError& e) {
    std::cerr << "lookup error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
