#include "ira/arbitrage.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "ira/error.hpp"
#include "ira/io_util.hpp"

namespace ira {

namespace {

using solver::RowSense;
using solver::Triplet;

constexpr double kIdleTol = 1e-9;
constexpr double kCleanTol = 1e-10;

void require_prices(const PriceSet& prices) {
  const std::size_t n = prices.size();
  const std::vector<const std::vector<double>*> series{&prices.buy_a,     &prices.sell_a,     &prices.buy_b,
                                                       &prices.sell_b,    &prices.buy_b_adj, &prices.sell_b_adj,
                                                       &prices.rent};
  for (const auto* s : series) {
    if (s->size() != n) throw ShapeError("price series must share one horizon");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto* s : series) {
      if (!std::isfinite((*s)[i])) throw DataError("non-finite price at step " + std::to_string(i));
    }
    if (prices.buy_a[i] < 0.0 || prices.sell_a[i] < 0.0 || prices.buy_b[i] < 0.0 || prices.sell_b[i] < 0.0) {
      throw ParameterError("negative price at step " + std::to_string(i) + "; clamp prices before optimizing");
    }
    if (prices.buy_a[i] < prices.sell_a[i] || prices.buy_b[i] < prices.sell_b[i]) {
      throw ParameterError("buy price below sell price at step " + std::to_string(i));
    }
  }
}

double epigraph_box(double buy, double sell, double x_min, double x_max, double eta_min) {
  return std::max(std::abs(buy), std::abs(sell)) * std::max(std::abs(x_min), x_max) / eta_min + 1.0;
}

double clean(double v) { return std::abs(v) < kCleanTol ? 0.0 : v; }

// Appends a lower-triangular block: row (row0 + i) gets `sign` at columns col0 + 0..i.
void push_prefix_block(std::vector<Triplet>& t, std::size_t row0, std::size_t col0, std::size_t n, double sign) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k <= i; ++k) t.push_back({row0 + i, col0 + k, sign});
  }
}

void push_diag(std::vector<Triplet>& t, std::size_t row0, std::size_t col0, std::size_t n, double v) {
  for (std::size_t i = 0; i < n; ++i) t.push_back({row0 + i, col0 + i, v});
}

}  // namespace

BlockingSpec BlockingSpec::none(const BatteryParams& p) { return {p.b_max, p.b_min}; }

BlockingSpec BlockingSpec::symmetric(const BatteryParams& p, double b_block) {
  if (!(b_block >= 0.0)) throw ParameterError("blocking: b_block must be nonnegative");
  if (b_block > p.b_max - p.b_min + 1e-12) throw ParameterError("blocking: b_block exceeds the battery capacity band");
  const BlockingSpec spec{p.b_max - b_block / 2.0, p.b_min + b_block / 2.0};
  spec.validate(p);
  return spec;
}

void BlockingSpec::validate(const BatteryParams& p) const {
  constexpr double tol = 1e-12;
  if (!(p.b_min - tol <= b_min_prime && b_min_prime <= b_max_prime + tol && b_max_prime <= p.b_max + tol)) {
    throw ParameterError("blocking: need b_min <= b_min' <= b_max' <= b_max");
  }
}

ArbitrageProblem build_pmilp(const PriceSet& prices, const BatteryParams& battery, const OperatingEnvelope& envelope,
                             const BlockingSpec& blocking, const PmilpOptions& options) {
  battery.validate();
  blocking.validate(battery);
  require_prices(prices);
  const std::size_t n = prices.size();
  if (n == 0) throw ShapeError("build_pmilp: empty horizon");
  if (envelope.size() != n || envelope.x_max_adj.size() != n) {
    throw ShapeError("build_pmilp: envelope length differs from the price horizon");
  }
  const double x_min = battery.x_min();
  const double x_max = battery.x_max();
  envelope.validate(x_min, x_max);
  if (battery.b0 < blocking.b_min_prime - 1e-12 || battery.b0 > blocking.b_max_prime + 1e-12) {
    throw InfeasibleError("build_pmilp: b0 lies outside the blocked band [b_min', b_max']");
  }

  ArbitrageProblem ap;
  ap.battery = battery;
  ap.envelope = envelope;
  ap.blocking = blocking;
  const auto eff = effective_efficiencies(battery);
  ap.eta_ch_star = eff.eta_ch_star;
  ap.eta_dis_star = eff.eta_dis_star;
  const double eta_min = std::min(eff.eta_ch_star, eff.eta_dis_star);

  const std::size_t xa = 0, xb = n, ta = 2 * n, tb = 3 * n, zc = 4 * n, zd = 5 * n;
  const std::size_t rows = kPmilpRowBlocks * n + (options.terminal_soc ? 1 : 0);
  const std::size_t cols = kPmilpColBlocks * n;

  std::vector<Triplet> t;
  t.reserve(16 * n + 2 * n * (n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({0 * n + i, xa + i, prices.buy_a[i] / eff.eta_ch_star});
    t.push_back({0 * n + i, ta + i, -1.0});
    t.push_back({1 * n + i, xa + i, prices.sell_a[i] * eff.eta_dis_star});
    t.push_back({1 * n + i, ta + i, -1.0});
    t.push_back({2 * n + i, xb + i, prices.buy_b_adj[i] / eff.eta_ch_star});
    t.push_back({2 * n + i, tb + i, -1.0});
    t.push_back({3 * n + i, xb + i, prices.sell_b_adj[i] * eff.eta_dis_star});
    t.push_back({3 * n + i, tb + i, -1.0});
  }
  push_prefix_block(t, 4 * n, xa, n, 1.0);
  push_prefix_block(t, 4 * n, xb, n, 1.0);
  push_prefix_block(t, 5 * n, xa, n, -1.0);
  push_prefix_block(t, 5 * n, xb, n, -1.0);
  push_diag(t, 6 * n, xa, n, 1.0);
  push_diag(t, 6 * n, xb, n, 1.0);
  push_diag(t, 7 * n, xa, n, -1.0);
  push_diag(t, 7 * n, xb, n, -1.0);
  push_diag(t, 8 * n, xa, n, -1.0);
  push_diag(t, 8 * n, zc, n, x_min);
  push_diag(t, 9 * n, xa, n, 1.0);
  push_diag(t, 9 * n, zd, n, -x_max);
  push_diag(t, 10 * n, xb, n, -1.0);
  push_diag(t, 10 * n, zc, n, x_min);
  push_diag(t, 11 * n, xb, n, 1.0);
  push_diag(t, 11 * n, zd, n, -x_max);
  push_diag(t, 12 * n, zc, n, 1.0);
  push_diag(t, 12 * n, zd, n, 1.0);
  if (options.terminal_soc) {
    for (std::size_t i = 0; i < n; ++i) {
      t.push_back({13 * n, xa + i, 1.0});
      t.push_back({13 * n, xb + i, 1.0});
    }
  }

  auto& m = ap.milp;
  m.constraints = solver::SparseMatrix::from_triplets(rows, cols, std::move(t));
  m.rhs.assign(rows, 0.0);
  m.sense.assign(rows, RowSense::LessEqual);
  for (std::size_t i = 0; i < n; ++i) {
    m.rhs[4 * n + i] = blocking.b_max_prime - battery.b0;
    m.rhs[5 * n + i] = battery.b0 - blocking.b_min_prime;
    m.rhs[6 * n + i] = x_max;
    m.rhs[7 * n + i] = -x_min;
    m.rhs[12 * n + i] = 1.0;
    m.sense[12 * n + i] = RowSense::Equal;
  }
  if (options.terminal_soc) m.sense[13 * n] = RowSense::Equal;

  m.objective.assign(cols, 0.0);
  std::fill(m.objective.begin() + static_cast<std::ptrdiff_t>(ta), m.objective.begin() + static_cast<std::ptrdiff_t>(zc),
            1.0);
  m.lower.assign(cols, 0.0);
  m.upper.assign(cols, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.lower[xa + i] = x_min;
    m.upper[xa + i] = x_max;
    m.lower[xb + i] = envelope.x_min_adj[i];
    m.upper[xb + i] = envelope.x_max_adj[i];
    const double box_a = epigraph_box(prices.buy_a[i], prices.sell_a[i], x_min, x_max, eta_min);
    const double box_b = epigraph_box(prices.buy_b_adj[i], prices.sell_b_adj[i], x_min, x_max, eta_min);
    m.lower[ta + i] = -box_a;
    m.upper[ta + i] = box_a;
    m.lower[tb + i] = -box_b;
    m.upper[tb + i] = box_b;
  }
  m.binary_idx.resize(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) m.binary_idx[k] = zc + k;
  m.horizon = n;
  m.validate();
  return ap;
}

namespace {

struct Cuts {
  std::vector<double> buy_a, sell_a, buy_b, sell_b;
};

Cuts read_cuts(const ArbitrageProblem& p) {
  const std::size_t n = p.horizon();
  const auto& a = p.milp.constraints;
  Cuts c;
  for (std::size_t i = 0; i < n; ++i) {
    c.buy_a.push_back(a.coeff(0 * n + i, p.col_x_a(i)));
    c.sell_a.push_back(a.coeff(1 * n + i, p.col_x_a(i)));
    c.buy_b.push_back(a.coeff(2 * n + i, p.col_x_b(i)));
    c.sell_b.push_back(a.coeff(3 * n + i, p.col_x_b(i)));
  }
  return c;
}

}  // namespace

solver::BnbHooks make_bnb_hooks(const ArbitrageProblem& problem) {
  auto cuts = std::make_shared<Cuts>(read_cuts(problem));
  const std::size_t n = problem.horizon();
  solver::BnbHooks hooks;
  hooks.repair = [cuts, n](std::span<const double> lp_x) -> std::optional<std::vector<double>> {
    std::vector<double> x(lp_x.begin(), lp_x.end());
    for (std::size_t i = 0; i < n; ++i) {
      double& a = x[i];
      double& b = x[n + i];
      if (std::abs(a) <= kIdleTol) a = 0.0;
      if (std::abs(b) <= kIdleTol) b = 0.0;
      // Opposite signs: route the net change through one leg so the SoC path is unchanged.
      if (a * b < 0.0) {
        const double net = a + b;
        const bool keep_a = net >= 0.0 ? a > 0.0 : a < 0.0;
        a = keep_a ? net : 0.0;
        b = keep_a ? 0.0 : net;
      }
      const bool discharge = a < 0.0 || b < 0.0;
      x[4 * n + i] = discharge ? 1.0 : 0.0;
      x[5 * n + i] = discharge ? 0.0 : 1.0;
      x[2 * n + i] = std::max(cuts->buy_a[i] * a, cuts->sell_a[i] * a);
      x[3 * n + i] = std::max(cuts->buy_b[i] * b, cuts->sell_b[i] * b);
    }
    return x;
  };
  hooks.branch_candidates = [n](std::span<const double> lp_x) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (lp_x[i] * lp_x[n + i] < -kIdleTol * kIdleTol) out.push_back(4 * n + i);
    }
    return out;
  };
  return hooks;
}

ArbitrageSolution decode_solution(const ArbitrageProblem& problem, std::span<const double> raw_x,
                                  solver::LpStatus status) {
  const std::size_t n = problem.horizon();
  if (raw_x.size() != kPmilpColBlocks * n) throw ShapeError("decode_solution: raw vector must have 6N entries");
  ArbitrageSolution s;
  s.status = status;
  s.x_a.resize(n);
  s.x_b.resize(n);
  s.t_a.resize(n);
  s.t_b.resize(n);
  s.z_ch.resize(n);
  s.z_dis.resize(n);
  std::vector<double> total(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.x_a[i] = clean(raw_x[problem.col_x_a(i)]);
    s.x_b[i] = clean(raw_x[problem.col_x_b(i)]);
    s.t_a[i] = clean(raw_x[problem.col_t_a(i)]);
    s.t_b[i] = clean(raw_x[problem.col_t_b(i)]);
    const long zc = std::lround(raw_x[problem.col_z_ch(i)]);
    const long zd = std::lround(raw_x[problem.col_z_dis(i)]);
    const bool idle = std::abs(s.x_a[i]) <= kIdleTol && std::abs(s.x_b[i]) <= kIdleTol;
    if (idle) {
      s.z_ch[i] = 0;
      s.z_dis[i] = 1;
    } else {
      if (zc + zd != 1) {
        throw SolverInconsistencyError("decode_solution: z_ch + z_dis != 1 at step " + std::to_string(i));
      }
      s.z_ch[i] = static_cast<int>(zc);
      s.z_dis[i] = static_cast<int>(zd);
    }
    total[i] = s.x_a[i] + s.x_b[i];
    s.objective += s.t_a[i] + s.t_b[i];
  }
  s.soc = simulate_soc(problem.battery, total);
  const auto report = check_feasible(problem.battery, s.x_a, s.x_b, problem.envelope, problem.blocking.b_min_prime,
                                     problem.blocking.b_max_prime);
  if (!report.feasible()) {
    const auto& v = report.violations.front();
    std::ostringstream msg;
    msg << "decode_solution: solver output fails the feasibility re-check (" << to_string(v.kind) << " at step "
        << v.step << ", excess " << v.amount << ", " << report.violations.size() << " violation(s))";
    throw SolverInconsistencyError(msg.str());
  }
  return s;
}

solver::MilpProblem compact_view(const ArbitrageProblem& problem) {
  const auto& src = problem.milp;
  const std::size_t n = problem.horizon();
  const std::size_t cols = (kPmilpColBlocks + 1) * n;
  const std::size_t s0 = kPmilpColBlocks * n;
  const bool terminal = src.num_rows() > kPmilpRowBlocks * n;
  // Source row r maps to r for blocks 0-3, dropped for blocks 4-5, r - n for blocks 6-12.
  auto map_row = [n](std::size_t r) -> std::ptrdiff_t {
    if (r < 4 * n) return static_cast<std::ptrdiff_t>(r);
    if (r < 6 * n) return -1;
    if (r < kPmilpRowBlocks * n) return static_cast<std::ptrdiff_t>(r - n);
    return -1;
  };
  const std::size_t rows = (kPmilpRowBlocks - 1) * n;
  std::vector<Triplet> t;
  solver::MilpProblem out;
  out.rhs.assign(rows, 0.0);
  out.sense.assign(rows, RowSense::LessEqual);
  for (std::size_t r = 0; r < src.num_rows(); ++r) {
    const std::ptrdiff_t mr = map_row(r);
    if (mr < 0) continue;
    const auto cs = src.constraints.row_columns(r);
    const auto vs = src.constraints.row_values(r);
    for (std::size_t k = 0; k < cs.size(); ++k) t.push_back({static_cast<std::size_t>(mr), cs[k], vs[k]});
    out.rhs[static_cast<std::size_t>(mr)] = src.rhs[r];
    out.sense[static_cast<std::size_t>(mr)] = src.sense.empty() ? RowSense::LessEqual : src.sense[r];
  }
  // Balance rows take the place of the first capacity block.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = 4 * n + i;
    t.push_back({r, s0 + i, 1.0});
    if (i > 0) t.push_back({r, s0 + i - 1, -1.0});
    t.push_back({r, problem.col_x_a(i), -1.0});
    t.push_back({r, problem.col_x_b(i), -1.0});
    out.sense[r] = RowSense::Equal;
  }
  out.constraints = solver::SparseMatrix::from_triplets(rows, cols, std::move(t));
  out.objective = src.objective;
  out.objective.resize(cols, 0.0);
  out.lower = src.lower;
  out.upper = src.upper;
  out.lower.resize(cols, problem.blocking.b_min_prime - problem.battery.b0);
  out.upper.resize(cols, problem.blocking.b_max_prime - problem.battery.b0);
  if (terminal) out.lower[cols - 1] = out.upper[cols - 1] = 0.0;
  out.binary_idx = src.binary_idx;
  out.horizon = n;
  out.validate();
  return out;
}

ArbitrageSolution solve_arbitrage(const ArbitrageProblem& problem, const solver::BnbConfig& config,
                                  solver::MilpResult* raw) {
  solver::MilpResult r = solver::solve_milp(compact_view(problem), config, make_bnb_hooks(problem));
  if (r.has_incumbent) r.x.resize(kPmilpColBlocks * problem.horizon());
  ArbitrageSolution s;
  if (r.has_incumbent) {
    s = decode_solution(problem, r.x, r.status);
  } else {
    s.status = r.status;
  }
  if (raw != nullptr) *raw = std::move(r);
  return s;
}

RevenueSplit revenue_split(const ArbitrageSolution& solution, const ArbitrageProblem& problem, const PriceSet& prices) {
  const std::size_t n = solution.x_a.size();
  if (prices.size() != n || solution.x_b.size() != n) throw ShapeError("revenue_split: horizon mismatch");
  RevenueSplit r;
  const double ch = problem.eta_ch_star;
  const double dis = problem.eta_dis_star;
  for (std::size_t i = 0; i < n; ++i) {
    const double a_in = std::max(0.0, solution.x_a[i]);
    const double a_out = std::max(0.0, -solution.x_a[i]);
    const double b_in = std::max(0.0, solution.x_b[i]);
    const double b_out = std::max(0.0, -solution.x_b[i]);
    r.revenue_a -= prices.buy_a[i] * a_in / ch - prices.sell_a[i] * dis * a_out;
    r.revenue_b -= prices.buy_b_adj[i] * b_in / ch - prices.sell_b_adj[i] * dis * b_out;
    r.bought_a += a_in / ch;
    r.sold_a += a_out * dis;
    r.bought_b += b_in / ch;
    r.sold_b += b_out * dis;
  }
  return r;
}

void write_solution_csv(const std::filesystem::path& path, const ArbitrageSolution& solution,
                        const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw DataError("write_solution_csv: cannot open " + path.string());
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "t,x_a,x_b,soc,z_ch\n";
  for (std::size_t i = 0; i < solution.x_a.size(); ++i) {
    out << i << ',' << format_double(solution.x_a[i]) << ',' << format_double(solution.x_b[i]) << ','
        << format_double(solution.soc[i]) << ',' << solution.z_ch[i] << '\n';
  }
}

K1Problem build_k1(const PriceSet& prices, const BatteryParams& battery, K1Efficiency efficiency) {
  battery.validate();
  require_prices(prices);
  const std::size_t n = prices.size();
  if (n == 0) throw ShapeError("build_k1: empty horizon");
  K1Problem k;
  k.battery = battery;
  if (efficiency == K1Efficiency::AsWritten) {
    k.eta_ch = battery.eta_ch;
    k.eta_dis = battery.eta_dis;
  } else {
    const auto eff = effective_efficiencies(battery);
    k.eta_ch = eff.eta_ch_star;
    k.eta_dis = eff.eta_dis_star;
  }
  k.best_buy.resize(n);
  k.best_sell.resize(n);
  const double x_min = battery.x_min();
  const double x_max = battery.x_max();
  std::vector<Triplet> t;
  auto& lp = k.lp;
  lp.lower.assign(2 * n, 0.0);
  lp.upper.assign(2 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    k.best_buy[i] = std::min(prices.buy_a[i], prices.buy_b_adj[i]);
    k.best_sell[i] = std::max(prices.sell_a[i], prices.sell_b_adj[i]);
    t.push_back({i, i, k.best_buy[i] / k.eta_ch});
    t.push_back({i, n + i, -1.0});
    t.push_back({n + i, i, k.best_sell[i] * k.eta_dis});
    t.push_back({n + i, n + i, -1.0});
    const double box = epigraph_box(k.best_buy[i], k.best_sell[i], x_min, x_max, std::min(k.eta_ch, k.eta_dis));
    lp.lower[i] = x_min;
    lp.upper[i] = x_max;
    lp.lower[n + i] = -box;
    lp.upper[n + i] = box;
  }
  push_prefix_block(t, 2 * n, 0, n, 1.0);
  push_prefix_block(t, 3 * n, 0, n, -1.0);
  lp.constraints = solver::SparseMatrix::from_triplets(4 * n, 2 * n, std::move(t));
  lp.rhs.assign(4 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    lp.rhs[2 * n + i] = battery.b_max - battery.b0;
    lp.rhs[3 * n + i] = battery.b0 - battery.b_min;
  }
  lp.objective.assign(2 * n, 0.0);
  std::fill(lp.objective.begin() + static_cast<std::ptrdiff_t>(n), lp.objective.end(), 1.0);
  lp.horizon = n;
  lp.validate();
  return k;
}

K1Solution solve_k1(const K1Problem& problem) {
  const auto r = solver::solve_lp(problem.lp);
  K1Solution s;
  s.status = r.status;
  if (r.status != solver::LpStatus::Optimal) return s;
  const std::size_t n = problem.lp.horizon;
  s.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.x[i] = clean(r.x[i]);
    s.objective += r.x[n + i];
  }
  s.soc = simulate_soc(problem.battery, s.x);
  return s;
}

}  // namespace ira
