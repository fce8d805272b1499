#include "ira/config.hpp"

#include <algorithm>
#include <concepts>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ira/error.hpp"
#include "ira/io_util.hpp"
#include "ira/time_util.hpp"

namespace ira {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size() || !std::isfinite(v)) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

// Reads keys from the tree and remembers which ones were consumed.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void get(const std::string& key, double& out) {
    if (auto v = raw(key)) out = to_double(key, *v);
  }

  template <std::unsigned_integral T>
  void get(const std::string& key, T& out) {
    if (auto v = raw(key)) {
      try {
        std::size_t used = 0;
        const auto n = std::stoull(*v, &used);
        if (used != v->size() || v->front() == '-') throw std::invalid_argument(*v);
        out = static_cast<T>(n);
      } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" + *v + "'");
      }
    }
  }

  void get(const std::string& key, bool& out) {
    if (auto v = raw(key)) {
      std::string s = *v;
      std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
      if (s == "true" || s == "1" || s == "yes" || s == "on") {
        out = true;
      } else if (s == "false" || s == "0" || s == "no" || s == "off") {
        out = false;
      } else {
        throw ConfigError("config key '" + key + "': expected true or false, got '" + *v + "'");
      }
    }
  }

  void get(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = *v;
  }

  template <class Parse>
  void get_enum(const std::string& key, Parse parse) {
    if (auto v = raw(key)) parse(*v);
  }

  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty()) throw ConfigError("config key '" + section + "' lies outside any section");
      for (const auto& [name, value] : body) {
        const auto key = section + "." + name;
        if (!used_.count(key)) throw ConfigError("unknown config key '" + key + "'");
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::set<std::string> used_;
};

Unit price_unit(const std::string& key, const std::string& text) {
  Unit u;
  try {
    u = parse_unit(text);
  } catch (const SchemaError& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
  if (!is_price(u)) throw ConfigError("config key '" + key + "': not a price unit");
  return u;
}

void check_date(const std::string& key, const std::string& text) {
  if (text.empty()) return;
  try {
    parse_utc(text + "T00:00Z");
  } catch (const Error&) {
    throw ConfigError("config key '" + key + "': expected YYYY-MM-DD, got '" + text + "'");
  }
}

std::string axis_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

std::string to_string(K1Efficiency e) { return e == K1Efficiency::AsWritten ? "as_written" : "inverter"; }
std::string to_string(solver::WarmStart w) { return w == solver::WarmStart::Parent ? "parent" : "previous"; }
std::string to_string(BlockRule r) { return r == BlockRule::DemandMinusBlock ? "demand_minus_block" : "block_size"; }

void validate(const StudyConfig& c) {
  try {
    c.battery.validate();
    c.solver.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (c.rent < 0.0) throw ConfigError("market.rent must be nonnegative");
  if (!(c.eta_line > 0.0 && c.eta_line <= 1.0)) throw ConfigError("market.eta_line must lie in (0, 1]");
  if (!(c.l_max > 0.0) || !(c.l_max_b_side > 0.0)) throw ConfigError("market line limits must be positive");
  if (c.reserved_fraction < 0.0 || c.reserved_fraction > 1.0) throw ConfigError("study.reserved_fraction must lie in [0, 1]");
  if (c.b_block < 0.0 || c.b_block > c.battery.b_max - c.battery.b_min + 1e-12) {
    throw ConfigError("study.b_block must lie in [0, b_max - b_min]");
  }
  if (c.data.source == DataSource::Files) {
    if (c.data.price_a.empty() || c.data.price_b.empty()) throw ConfigError("data.price_a and data.price_b are required");
    const bool c3 = c.scenario == Scenario::C3 && c.envelope_source == EnvelopeSource::Flows;
    if (c3 && c.link == LinkLayout::Single && c.data.flow.empty()) throw ConfigError("scenario C3 needs data.flow");
    if (c3 && c.link == LinkLayout::Hybrid && (c.data.flow.empty() || c.data.flow_b_side.empty())) {
      throw ConfigError("hybrid C3 needs data.flow and data.flow_b_side");
    }
    if (c.envelope_source == EnvelopeSource::Dispatch &&
        (c.data.demand_a.empty() || c.data.demand_b.empty() || c.data.wind.empty())) {
      throw ConfigError("dispatch flows need data.demand_a, data.demand_b and data.wind");
    }
  }
  if (c.data.synthetic.days == 0) throw ConfigError("data.days must be positive");
  if (!c.data.start.empty() && !c.data.end.empty() && c.data.end < c.data.start) {
    throw ConfigError("data.end precedes data.start");
  }
  for (std::size_t i = 1; i < c.sweep.values.size(); ++i) {
    if (!(c.sweep.values[i] > c.sweep.values[i - 1])) throw ConfigError("sweep.values must be strictly increasing");
  }
}

std::filesystem::path resolve(const DataConfig& d, const std::string& file) {
  std::filesystem::path p(file);
  if (p.is_relative() && !d.dir.empty()) p = d.dir / p;
  if (!std::filesystem::exists(p)) throw DataError("data file not found: " + p.string());
  return p;
}

}  // namespace

std::string to_string(DataSource s) { return s == DataSource::Synthetic ? "synthetic" : "files"; }
std::string to_string(EnvelopeSource s) { return s == EnvelopeSource::Flows ? "flows" : "dispatch"; }
std::string to_string(LinkLayout s) { return s == LinkLayout::Single ? "single" : "hybrid"; }

std::vector<double> parse_axis(const std::string& text) {
  const auto t = trim(text);
  std::vector<double> out;
  if (t.empty()) return out;
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("axis '" + text + "': expected start:stop:step");
    const double a = to_double("axis", parts[0]), b = to_double("axis", parts[1]), step = to_double("axis", parts[2]);
    if (!(step > 0.0) || b < a) throw ConfigError("axis '" + text + "': need step > 0 and stop >= start");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  std::stringstream ss(t);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double("axis", p));
  return out;
}

StudySettings StudyConfig::settings() const {
  StudySettings s;
  s.battery = battery;
  s.rent = rent;
  s.eta_line = eta_line;
  s.l_max = l_max;
  s.l_max_b_side = l_max_b_side;
  if (envelope_source == EnvelopeSource::Dispatch) {
    if (link == LinkLayout::Hybrid) {
      s.l_max = dispatch.nautilus_be_capacity + dispatch.hvac_capacity;
      s.l_max_b_side = dispatch.nautilus_uk_capacity;
    } else {
      s.l_max = dispatch.nemo_capacity;
    }
  }
  s.b_block = b_block;
  s.split = split;
  s.reserved_fraction = reserved_fraction;
  s.terminal_soc = terminal_soc;
  s.k1_efficiency = k1_efficiency;
  s.solver = solver;
  return s;
}

std::string StudyConfig::canonical() const {
  pt::ptree t;
  auto put = [&](const std::string& key, const std::string& v) { t.put(pt::ptree::path_type(key, '.'), v); };
  auto num = [&](const std::string& key, double v) { put(key, format_double(v)); };
  auto flag = [&](const std::string& key, bool v) { put(key, v ? "true" : "false"); };
  const auto& b = battery;
  num("battery.b_min", b.b_min);
  num("battery.b_max", b.b_max);
  num("battery.b0", b.b0);
  num("battery.delta_min", b.delta_min);
  num("battery.delta_max", b.delta_max);
  num("battery.eta_ch", b.eta_ch);
  num("battery.eta_dis", b.eta_dis);
  num("battery.eta_inv", b.eta_inv);
  num("battery.h", b.h);
  num("battery.cost_per_kwh", b.cost_per_kwh);
  num("battery.cycle_life", b.cycle_life_100dod);
  num("battery.calendar_life", b.calendar_life);
  num("market.rent", rent);
  num("market.eta_line", eta_line);
  num("market.l_max", l_max);
  num("market.l_max_b_side", l_max_b_side);
  put("data.source", to_string(data.source));
  if (data.source == DataSource::Files) {
    put("data.price_a", data.price_a);
    put("data.price_b", data.price_b);
    put("data.flow", data.flow);
    put("data.flow_b_side", data.flow_b_side);
    put("data.demand_a", data.demand_a);
    put("data.demand_b", data.demand_b);
    put("data.wind", data.wind);
    put("data.price_a_unit", to_string(data.price_a_unit));
    put("data.price_b_unit", to_string(data.price_b_unit));
  } else {
    const auto& s = data.synthetic;
    put("data.days", std::to_string(s.days));
    put("data.seed", std::to_string(s.seed));
    num("data.mean_price_a", s.mean_price_a);
    num("data.skew", s.skew);
    num("data.daily_swing", s.daily_swing);
    num("data.noise", s.noise);
    num("data.line_limit", s.line_limit);
    num("data.saturated_share", s.saturated_share);
    num("data.wind_rating", s.wind_rating);
    put("data.start_date", s.start_date);
  }
  put("data.start", data.start);
  put("data.end", data.end);
  put("study.scenario", to_string(scenario));
  num("study.b_block", b_block);
  put("study.split", to_string(split));
  num("study.reserved_fraction", reserved_fraction);
  flag("study.terminal_soc", terminal_soc);
  put("study.k1_efficiency", to_string(k1_efficiency));
  put("study.envelope_source", to_string(envelope_source));
  put("study.link", to_string(link));
  num("solver.gap", solver.gap_tol);
  num("solver.integer_tol", solver.integer_tol);
  put("solver.node_limit", std::to_string(solver.node_limit));
  num("solver.time_limit", solver.time_limit);
  put("solver.warm_start", to_string(solver.warm_start));
  put("solver.log_interval", std::to_string(solver.log_interval));
  flag("solver.parallel", parallel);
  num("dispatch.block_size", dispatch.block_size);
  put("dispatch.block_rule", to_string(dispatch.block_rule));
  num("dispatch.bid_factor", dispatch.bid_factor);
  num("dispatch.infinite_cap_factor", dispatch.infinite_cap_factor);
  num("dispatch.nemo", dispatch.nemo_capacity);
  num("dispatch.nautilus_uk", dispatch.nautilus_uk_capacity);
  num("dispatch.nautilus_be", dispatch.nautilus_be_capacity);
  num("dispatch.hvac", dispatch.hvac_capacity);
  num("dispatch.wind_rating", dispatch.wind_rating);
  put("sweep.kind", to_string(sweep.kind));
  put("sweep.values", axis_text(sweep.values));
  std::ostringstream out;
  pt::write_ini(out, t);
  return out.str();
}

std::string StudyConfig::hash() const { return hex64(fnv1a64(canonical())); }

StudyConfig parse_config(const std::string& text, const ConfigOverrides& overrides,
                         const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [key, value] : overrides) {
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() || key.find('.', dot + 1) != std::string::npos) {
      throw ConfigError("override '" + key + "' must be section.key");
    }
    tree.put(pt::ptree::path_type(key, '.'), value);
  }

  StudyConfig c;
  Reader r(tree);
  auto& b = c.battery;
  r.get("battery.b_min", b.b_min);
  r.get("battery.b_max", b.b_max);
  r.get("battery.b0", b.b0);
  r.get("battery.delta_min", b.delta_min);
  r.get("battery.delta_max", b.delta_max);
  r.get("battery.eta_ch", b.eta_ch);
  r.get("battery.eta_dis", b.eta_dis);
  r.get("battery.eta_inv", b.eta_inv);
  r.get("battery.h", b.h);
  r.get("battery.cost_per_kwh", b.cost_per_kwh);
  r.get("battery.cycle_life", b.cycle_life_100dod);
  r.get("battery.calendar_life", b.calendar_life);

  r.get("market.rent", c.rent);
  r.get("market.eta_line", c.eta_line);
  r.get("market.l_max", c.l_max);
  r.get("market.l_max_b_side", c.l_max_b_side);

  auto& d = c.data;
  r.get_enum("data.source", [&](const std::string& v) {
    if (v == "synthetic") {
      d.source = DataSource::Synthetic;
    } else if (v == "files") {
      d.source = DataSource::Files;
    } else {
      throw ConfigError("data.source must be synthetic or files");
    }
  });
  std::string dir;
  r.get("data.dir", dir);
  if (!dir.empty()) {
    d.dir = dir;
    if (d.dir.is_relative() && !base_dir.empty()) d.dir = base_dir / d.dir;
  } else if (const char* env = std::getenv("IRA_DATA_DIR"); env && *env) {
    d.dir = env;
  } else {
    d.dir = base_dir;
  }
  r.get("data.price_a", d.price_a);
  r.get("data.price_b", d.price_b);
  r.get("data.flow", d.flow);
  r.get("data.flow_b_side", d.flow_b_side);
  r.get("data.demand_a", d.demand_a);
  r.get("data.demand_b", d.demand_b);
  r.get("data.wind", d.wind);
  r.get_enum("data.price_a_unit", [&](const std::string& v) { d.price_a_unit = price_unit("data.price_a_unit", v); });
  r.get_enum("data.price_b_unit", [&](const std::string& v) { d.price_b_unit = price_unit("data.price_b_unit", v); });
  r.get("data.start", d.start);
  r.get("data.end", d.end);
  check_date("data.start", d.start);
  check_date("data.end", d.end);
  auto& s = d.synthetic;
  r.get("data.days", s.days);
  r.get("data.seed", s.seed);
  r.get("data.mean_price_a", s.mean_price_a);
  r.get("data.skew", s.skew);
  r.get("data.daily_swing", s.daily_swing);
  r.get("data.noise", s.noise);
  r.get("data.line_limit", s.line_limit);
  r.get("data.saturated_share", s.saturated_share);
  r.get("data.wind_rating", s.wind_rating);
  r.get("data.start_date", s.start_date);
  check_date("data.start_date", s.start_date);

  r.get_enum("study.scenario", [&](const std::string& v) { c.scenario = parse_scenario(v); });
  r.get("study.b_block", c.b_block);
  r.get_enum("study.split", [&](const std::string& v) { c.split = parse_blocking_split(v); });
  r.get("study.reserved_fraction", c.reserved_fraction);
  r.get("study.terminal_soc", c.terminal_soc);
  r.get_enum("study.k1_efficiency", [&](const std::string& v) {
    if (v == "as_written") {
      c.k1_efficiency = K1Efficiency::AsWritten;
    } else if (v == "inverter") {
      c.k1_efficiency = K1Efficiency::Inverter;
    } else {
      throw ConfigError("study.k1_efficiency must be as_written or inverter");
    }
  });
  r.get_enum("study.envelope_source", [&](const std::string& v) {
    if (v == "flows") {
      c.envelope_source = EnvelopeSource::Flows;
    } else if (v == "dispatch") {
      c.envelope_source = EnvelopeSource::Dispatch;
    } else {
      throw ConfigError("study.envelope_source must be flows or dispatch");
    }
  });
  r.get_enum("study.link", [&](const std::string& v) {
    if (v == "single") {
      c.link = LinkLayout::Single;
    } else if (v == "hybrid") {
      c.link = LinkLayout::Hybrid;
    } else {
      throw ConfigError("study.link must be single or hybrid");
    }
  });

  r.get("solver.gap", c.solver.gap_tol);
  r.get("solver.integer_tol", c.solver.integer_tol);
  r.get("solver.node_limit", c.solver.node_limit);
  r.get("solver.time_limit", c.solver.time_limit);
  r.get_enum("solver.warm_start", [&](const std::string& v) {
    if (v == "parent") {
      c.solver.warm_start = solver::WarmStart::Parent;
    } else if (v == "previous") {
      c.solver.warm_start = solver::WarmStart::Previous;
    } else {
      throw ConfigError("solver.warm_start must be parent or previous");
    }
  });
  r.get("solver.parallel", c.parallel);

  auto& p = c.dispatch;
  r.get("dispatch.block_size", p.block_size);
  r.get_enum("dispatch.block_rule", [&](const std::string& v) {
    if (v == "demand_minus_block") {
      p.block_rule = BlockRule::DemandMinusBlock;
    } else if (v == "block_size") {
      p.block_rule = BlockRule::BlockSize;
    } else {
      throw ConfigError("dispatch.block_rule must be demand_minus_block or block_size");
    }
  });
  r.get("dispatch.bid_factor", p.bid_factor);
  r.get("dispatch.infinite_cap_factor", p.infinite_cap_factor);
  r.get("dispatch.nemo", p.nemo_capacity);
  r.get("dispatch.nautilus_uk", p.nautilus_uk_capacity);
  r.get("dispatch.nautilus_be", p.nautilus_be_capacity);
  r.get("dispatch.hvac", p.hvac_capacity);
  r.get("dispatch.wind_rating", p.wind_rating);

  r.get_enum("sweep.kind", [&](const std::string& v) { c.sweep.kind = parse_sweep_kind(v); });
  r.get_enum("sweep.values", [&](const std::string& v) { c.sweep.values = parse_axis(v); });

  r.get("output.log_time", c.solver.log_elapsed);
  r.get("solver.log_interval", c.solver.log_interval);
  std::string out_dir;
  r.get("output.dir", out_dir);
  if (!out_dir.empty()) c.output_dir = out_dir;

  r.reject_unknown();
  validate(c);
  return c;
}

StudyConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  if (path.empty()) return parse_config("", overrides, {});
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, path.parent_path());
}

StudyInputs load_inputs(const StudyConfig& config) {
  StudyInputs in;
  const auto& d = config.data;
  std::vector<std::int64_t> stamps;
  if (d.source == DataSource::Synthetic) {
    const auto s = make_synthetic(d.synthetic);
    in.data = study_data_from(s);
    in.demand_a = s.demand_a;
    in.demand_b = s.demand_b;
    in.wind = s.wind;
    for (const auto& t : s.timestamps) stamps.push_back(parse_utc(t));
  } else {
    std::vector<CleanSeries> series;
    std::vector<std::string> roles;
    auto add_price = [&](const std::string& file, const char* role, Unit unit) {
      CleaningReport rep;
      series.push_back(ingest_price_series(resolve(d, file), SeriesSchema{role, unit}, &rep));
      in.reports.push_back(rep);
      roles.push_back(role);
    };
    auto add_plain = [&](const std::string& file, const char* role, Unit unit) {
      if (file.empty()) return;
      CleaningReport rep;
      series.push_back(clean_series(load_series(resolve(d, file), SeriesSchema{role, unit}), &rep));
      in.reports.push_back(rep);
      roles.push_back(role);
    };
    add_price(d.price_a, "price_a", d.price_a_unit);
    add_price(d.price_b, "price_b", d.price_b_unit);
    add_plain(d.flow, "flow", Unit::MW);
    add_plain(d.flow_b_side, "flow_b_side", Unit::MW);
    add_plain(d.demand_a, "demand_a", Unit::MW);
    add_plain(d.demand_b, "demand_b", Unit::MW);
    add_plain(d.wind, "wind", Unit::MW);
    const auto aligned = align_days(series);
    for (std::size_t i = 0; i < aligned.size(); ++i) {
      const auto& v = aligned[i].values;
      const auto& role = roles[i];
      if (role == "price_a") in.data.price_a = v;
      else if (role == "price_b") in.data.price_b = v;
      else if (role == "flow") in.data.flow = v;
      else if (role == "flow_b_side") in.data.flow_b_side = v;
      else if (role == "demand_a") in.demand_a = v;
      else if (role == "demand_b") in.demand_b = v;
      else if (role == "wind") in.wind = v;
    }
    if (!aligned.empty()) stamps = aligned.front().timestamps();
    for (auto t : stamps) in.data.timestamps.push_back(format_utc(t));
  }

  const std::int64_t lo = d.start.empty() ? INT64_MIN : parse_utc(d.start + "T00:00Z");
  const std::int64_t hi = d.end.empty() ? INT64_MAX : parse_utc(d.end + "T00:00Z") + kDay;
  std::size_t first = stamps.size(), last = 0;
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    if (stamps[i] >= lo && stamps[i] < hi) {
      first = std::min(first, i);
      last = i + 1;
    }
  }
  if (first >= last) throw DataError("no data inside the selected date range");
  if (first != 0 || last != stamps.size()) {
    const auto count = last - first;
    in.data = in.data.slice(first, count);
    auto cut = [&](std::vector<double>& v) {
      if (!v.empty()) v = std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(first), v.begin() + static_cast<std::ptrdiff_t>(last));
    };
    cut(in.demand_a);
    cut(in.demand_b);
    cut(in.wind);
  }
  if (config.link == LinkLayout::Single) in.data.flow_b_side.clear();
  in.data.validate();
  return in;
}

DispatchCase dispatch_case(const StudyConfig& config, const StudyInputs& inputs) {
  if (inputs.demand_a.empty() || inputs.demand_b.empty() || inputs.wind.empty()) {
    throw DataError("dispatch needs demand and wind series");
  }
  return build_case2(inputs.data.price_a, inputs.data.price_b, inputs.demand_a, inputs.demand_b, inputs.wind,
                     config.dispatch);
}

void apply_dispatch_flows(const StudyConfig& config, StudyInputs& inputs, const DispatchResult& result) {
  if (result.hours() != inputs.data.size()) throw ShapeError("dispatch result does not cover the study horizon");
  if (config.link == LinkLayout::Hybrid) {
    auto hoa = extract_hoa_flows(result);
    inputs.data.flow = std::move(hoa.be_side);
    inputs.data.flow_b_side = std::move(hoa.uk_side);
  } else {
    inputs.data.flow = extract_flows(result, kLineNemo);
    inputs.data.flow_b_side.clear();
  }
}

}  // namespace ira
