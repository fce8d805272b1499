#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ira/arbitrage.hpp"
#include "ira/error.hpp"
#include "ira/solver/branch_and_bound.hpp"
#include "ira/solver/brute_force.hpp"
#include "ira/solver/mps.hpp"
#include "ira/solver/simplex.hpp"
#include "support/instances.hpp"
#include "support/mps_reader.hpp"

using namespace ira;
using namespace ira::solver;

namespace {

MilpProblem two_binaries() {
  MilpProblem p;
  p.objective = {-1.0, -1.0};
  p.constraints = SparseMatrix::from_triplets(1, 2, {{0, 0, 1.0}, {0, 1, 1.0}});
  p.rhs = {2.0};
  p.lower = {0.0, 0.0};
  p.upper = {1.0, 1.0};
  p.binary_idx = {0, 1};
  return p;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("toy instance: branch-and-bound and enumeration agree on -45") {
  const auto p = test::toy_problem();
  const auto bnb = solve_milp(p.milp);
  REQUIRE(bnb.status == LpStatus::Optimal);
  CHECK(bnb.objective == doctest::Approx(-45.0).epsilon(1e-9));
  CHECK(bnb.best_bound <= bnb.objective + 1e-9);
  CHECK(bnb.gap <= 1e-7);

  const auto bf = brute_force(p.milp);
  REQUIRE(bf.status == LpStatus::Optimal);
  CHECK(bf.objective == doctest::Approx(-45.0).epsilon(1e-9));
  CHECK(bf.patterns == 4);
  CHECK(bf.x[p.col_x_a(0)] == doctest::Approx(0.5));
  CHECK(bf.x[p.col_x_a(1)] == doctest::Approx(-0.5));
  // Pattern bit i is z_ch at step i: charge then discharge.
  CHECK(bf.best_pattern == 0b10);

  const auto compact = solve_milp(compact_view(p), {}, make_bnb_hooks(p));
  CHECK(compact.objective == doctest::Approx(-45.0).epsilon(1e-9));
}

TEST_CASE("single step at the floor with constant price is worth nothing") {
  BatteryParams battery;
  battery.b0 = battery.b_min;
  const auto p = build_pmilp(PriceSet::from_clearing(std::vector<double>{40.0}, std::vector<double>{40.0}, 0.0, 1.0),
                             battery, OperatingEnvelope::full(1, -0.5, 0.5), BlockingSpec::none(battery));
  const auto bf = brute_force(p.milp);
  CHECK(bf.objective == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(bf.patterns == 2);
}

TEST_CASE("integral relaxation is solved at the root") {
  const auto r = solve_milp(two_binaries());
  CHECK(r.status == LpStatus::Optimal);
  CHECK(r.nodes == 1);
  CHECK(r.objective == doctest::Approx(-2.0));
  CHECK(r.root_objective == doctest::Approx(-2.0));
}

TEST_CASE("infeasible and limited searches") {
  auto p = two_binaries();
  p.sense = {RowSense::GreaterEqual};
  p.rhs = {3.0};
  CHECK(solve_milp(p).status == LpStatus::Infeasible);
  CHECK(brute_force(p).status == LpStatus::Infeasible);

  std::mt19937_64 rng(3);
  const auto inst = test::random_instance(rng, 30);
  BnbConfig cfg;
  cfg.node_limit = 1;
  const auto r = solve_milp(compact_view(test::build(inst)), cfg);
  CHECK((r.status == LpStatus::Limit || r.status == LpStatus::Optimal));
  CHECK(r.nodes <= 1);

  BnbConfig bad;
  bad.gap_tol = 0.0;
  CHECK_THROWS_AS(solve_milp(p, bad), ParameterError);
}

TEST_CASE("enumeration width limit") {
  std::vector<double> a(17, 40.0);
  const BatteryParams battery;
  const auto p = build_pmilp(PriceSet::from_clearing(a, a, 0.0, 1.0), battery, OperatingEnvelope::full(17, -0.5, 0.5),
                             BlockingSpec::none(battery));
  CHECK_THROWS_AS(brute_force(p.milp), SizeError);
  CHECK_THROWS_AS(brute_force_serial(p.milp), SizeError);
}

TEST_CASE("branch-and-bound matches enumeration on 100 random eight-step instances") {
  std::mt19937_64 rng(2019);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = test::random_instance(rng, 8);
    const auto p = test::build(inst);
    const auto bf = brute_force(p.milp);
    MilpResult raw;
    const auto s = solve_arbitrage(p, {}, &raw);
    REQUIRE(bf.status == LpStatus::Optimal);
    REQUIRE(raw.status == LpStatus::Optimal);
    worst = std::max(worst, std::abs(bf.objective - s.objective));
    CHECK(raw.best_bound <= raw.objective + 1e-9);

    const auto report = check_feasible(p.battery, s.x_a, s.x_b, p.envelope, p.blocking.b_min_prime,
                                       p.blocking.b_max_prime, 1e-6);
    CHECK(report.feasible());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("agreement for every horizon up to ten") {
  std::mt19937_64 rng(5);
  for (std::size_t n = 1; n <= 10; ++n) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto p = test::build(test::random_instance(rng, n));
      const auto bf = brute_force(p.milp);
      const auto bnb = solve_milp(p.milp);
      const auto relaxed = solve_lp(p.milp);
      INFO("n = " << n);
      CHECK(bnb.objective == doctest::Approx(bf.objective).epsilon(1e-9).scale(1.0));
      CHECK(relaxed.objective <= bnb.objective + 1e-7);
    }
  }
}

TEST_CASE("parallel enumeration equals the serial reference") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = test::build(test::random_instance(rng, 9));
    const auto par = brute_force(p.milp);
    const auto ser = brute_force_serial(p.milp);
    CHECK(par.objective == ser.objective);
    CHECK(par.best_pattern == ser.best_pattern);
    CHECK(par.feasible_patterns == ser.feasible_patterns);
    CHECK(par.x == ser.x);
  }
}

TEST_CASE("search log lines") {
  std::ostringstream log;
  BnbConfig cfg;
  cfg.log = &log;
  solve_milp(test::toy_problem().milp, cfg);
  std::string line;
  std::istringstream in(log.str());
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(lines >= 1);
}

TEST_CASE("mps numbers fit the field") {
  CHECK(mps_number(0.0) == "0");
  CHECK(mps_number(-0.5) == "-0.5");
  CHECK(mps_number(1.0 / 3.0) == "0.3333333333");
  CHECK(mps_number(42.0 / 0.975).size() <= 12);
  CHECK(mps_number(-1.23456789012345e-7).size() <= 12);
  CHECK(std::stod(mps_number(-1.23456789012345e-7)) == doctest::Approx(-1.23456789012345e-7).epsilon(1e-6));
  CHECK_THROWS_AS(mps_number(std::nan("")), ParameterError);
}

TEST_CASE("mps for one step") {
  const BatteryParams battery;
  const auto p = build_pmilp(PriceSet::from_clearing(std::vector<double>{40.0}, std::vector<double>{45.0}, 0.0, 0.975),
                             battery, OperatingEnvelope::full(1, -0.5, 0.5), BlockingSpec::none(battery));
  std::ostringstream out;
  write_mps(p.milp, out);
  std::istringstream in(out.str());
  const auto parsed = test::read_mps(in);
  CHECK(parsed.row_names.size() == 13);
  CHECK(parsed.col_names.size() == 6);
  CHECK(parsed.problem.binary_idx == std::vector<std::size_t>{4, 5});
  const auto text = out.str();
  const auto intorg = text.find("'INTORG'");
  const auto intend = text.find("'INTEND'");
  REQUIRE(intorg != std::string::npos);
  REQUIRE(intend != std::string::npos);
  CHECK(text.find("C0000004", intorg) < intend);
  CHECK(text.find("C0000005", intorg) < intend);
  CHECK(text.find("C0000003") < intorg);
}

TEST_CASE("mps round trip through an independent reader") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = test::build(test::random_instance(rng, 6));
    std::ostringstream out;
    write_mps(p.milp, out);
    std::istringstream in(out.str());
    const auto parsed = test::read_mps(in).problem;
    REQUIRE(parsed.num_rows() == p.milp.num_rows());
    REQUIRE(parsed.num_cols() == p.milp.num_cols());
    CHECK(parsed.binary_idx == p.milp.binary_idx);
    CHECK(parsed.sense == p.milp.sense);
    for (std::size_t j = 0; j < parsed.num_cols(); ++j) {
      CHECK(parsed.lower[j] == doctest::Approx(p.milp.lower[j]).epsilon(1e-8));
      CHECK(parsed.upper[j] == doctest::Approx(p.milp.upper[j]).epsilon(1e-8));
      CHECK(parsed.objective[j] == p.milp.objective[j]);
    }
    for (std::size_t i = 0; i < parsed.num_rows(); ++i) CHECK(parsed.rhs[i] == doctest::Approx(p.milp.rhs[i]));
    const auto a = p.milp.constraints.triplets();
    const auto b = parsed.constraints.triplets();
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].row == b[k].row);
      CHECK(a[k].col == b[k].col);
      CHECK(b[k].value == doctest::Approx(a[k].value).epsilon(1e-8));
    }
    // The re-read problem has the same optimum.
    CHECK(solve_milp(parsed).objective == doctest::Approx(solve_milp(p.milp).objective).epsilon(1e-8));
  }
}

TEST_CASE("mps golden file for a fixed two-step instance") {
  const BatteryParams battery;
  const auto prices = PriceSet::from_clearing(std::vector<double>{30.0, 50.0}, std::vector<double>{40.0, 60.0}, 2.0, 0.975);
  OperatingEnvelope env;
  env.x_min_adj = {-0.2, -0.5};
  env.x_max_adj = {0.3, 0.0};
  const auto p = build_pmilp(prices, battery, env, BlockingSpec::symmetric(battery, 0.2));
  const std::filesystem::path golden = std::filesystem::path(IRA_TEST_DATA_DIR) / "golden" / "pmilp_n2.mps";
  const auto out = std::filesystem::temp_directory_path() / "ira_test_pmilp_n2.mps";
  write_mps(p.milp, out, "PMILPN2");
  if (std::getenv("IRA_REGENERATE_GOLDEN") != nullptr) std::filesystem::copy_file(out, golden,
                                                                                   std::filesystem::copy_options::overwrite_existing);
  REQUIRE(std::filesystem::exists(golden));
  CHECK(read_text(out) == read_text(golden));
  std::filesystem::remove(out);
  CHECK_THROWS_AS(write_mps(p.milp, std::filesystem::path("/nonexistent-dir/x.mps")), DataError);
}
