#include "doctest.h"

#include <random>

#include "ira/battery.hpp"
#include "ira/error.hpp"

using namespace ira;

TEST_CASE("default parameters") {
  const BatteryParams p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.x_min() == -0.5);
  CHECK(p.x_max() == 0.5);
  CHECK(p.investment() == doctest::Approx(100000.0));
  BatteryParams bad = p;
  bad.b0 = 1.5;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = p;
  bad.eta_inv = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("effective efficiencies") {
  BatteryParams p;
  const auto e = effective_efficiencies(p);
  CHECK(e.eta_ch_star == doctest::Approx(0.9025).epsilon(1e-12));
  CHECK(e.eta_dis_star == doctest::Approx(0.9025).epsilon(1e-12));
  p.eta_inv = 1.0;
  CHECK(effective_efficiencies(p).eta_ch_star == p.eta_ch);
}

TEST_CASE("adjusted prices") {
  const std::vector<double> p{40.0};
  const std::vector<double> rent{5.0};
  const auto adj = adjust_prices(p, p, rent, 0.975);
  CHECK(std::abs(adj.buy[0] - 46.1538) <= 1e-4);
  CHECK(std::abs(adj.sell[0] - 34.125) <= 1e-12);
  const std::vector<double> zero{0.0};
  const auto same = adjust_prices(p, p, zero, 1.0);
  CHECK(same.buy[0] == 40.0);
  CHECK(same.sell[0] == 40.0);
  CHECK_THROWS_AS(adjust_prices(p, p, rent, 0.0), ParameterError);
  CHECK_THROWS_AS(adjust_prices(p, p, rent, -1.0), ParameterError);
}

TEST_CASE("adjusted prices bracket the raw prices") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> price(0.0, 200.0);
  std::uniform_real_distribution<double> zeta(0.0, 30.0);
  std::uniform_real_distribution<double> eta(0.5, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::vector<double> buy{price(rng)}, sell{price(rng)}, rent{zeta(rng)};
    const auto a = adjust_prices(buy, sell, rent, eta(rng));
    CHECK(a.buy[0] >= buy[0]);
    CHECK(a.sell[0] <= sell[0]);
  }
}

TEST_CASE("price set") {
  const std::vector<double> a{10.0, 20.0}, b{40.0, 40.0};
  const auto ps = PriceSet::from_clearing(a, b, 5.0, 0.975);
  CHECK(ps.size() == 2);
  CHECK(std::abs(ps.buy_b_adj[0] - 45.0 / 0.975) < 1e-12);
  CHECK(std::abs(ps.sell_b_adj[1] - 35.0 * 0.975) < 1e-12);
  CHECK_THROWS_AS(PriceSet::make({1.0}, {1.0, 2.0}, {1.0}, {1.0}, {0.0}, 1.0), ShapeError);
}

TEST_CASE("soc simulation") {
  const BatteryParams p;
  const std::vector<double> x{0.2, -0.3};
  const auto soc = simulate_soc(p, x);
  CHECK(soc[0] == doctest::Approx(0.7));
  CHECK(soc[1] == doctest::Approx(0.4));
  const std::vector<double> zero(4, 0.0);
  for (double b : simulate_soc(p, zero)) CHECK(b == p.b0);
  const std::vector<double> over{0.5, 0.5};
  const auto path = simulate_soc(p, over);
  CHECK(path[1] == doctest::Approx(1.5));
  const auto rep = check_feasible(p, over, std::vector<double>(2, 0.0), OperatingEnvelope::closed(2), p.b_min, p.b_max);
  REQUIRE_FALSE(rep.feasible());
  CHECK(rep.violations[0].kind == ViolationKind::Capacity);
  CHECK(rep.violations[0].step == 1);
}

TEST_CASE("soc minus baseline equals prefix sums") {
  const BatteryParams p;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> x(50);
  for (auto& v : x) v = u(rng);
  const auto soc = simulate_soc(p, x);
  double prefix = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    prefix += x[i];
    CHECK(std::abs((soc[i] - p.b0) - prefix) <= 1e-12);
  }
}

TEST_CASE("feasibility checks") {
  const BatteryParams p;
  const auto env = OperatingEnvelope::full(1, p.x_min(), p.x_max());
  auto has = [](const FeasibilityReport& r, ViolationKind k) {
    for (const auto& v : r.violations) {
      if (v.kind == k) return true;
    }
    return false;
  };
  const auto joint = check_feasible(p, std::vector<double>{0.3}, std::vector<double>{0.3}, env, p.b_min, p.b_max);
  CHECK(has(joint, ViolationKind::JointRamp));
  const auto sign = check_feasible(p, std::vector<double>{0.2}, std::vector<double>{-0.1}, env, p.b_min, p.b_max);
  CHECK(has(sign, ViolationKind::SimultaneousChargeDischarge));
  const auto ok = check_feasible(p, std::vector<double>{0.0}, std::vector<double>{0.0}, env, p.b_min, p.b_max);
  CHECK(ok.feasible());
  const auto envb = check_feasible(p, std::vector<double>{0.0}, std::vector<double>{0.1},
                                   OperatingEnvelope::closed(1), p.b_min, p.b_max);
  CHECK(has(envb, ViolationKind::EnvelopeB));
  CHECK_THROWS_AS(check_feasible(p, std::vector<double>{0.0}, std::vector<double>{0.0, 0.0}, env, p.b_min, p.b_max),
                  ShapeError);
}

TEST_CASE("grid power") {
  const BatteryParams p;
  CHECK(std::abs(grid_power(p, 0.5) - 0.5263) <= 1e-4);
  CHECK(grid_power(p, -0.5) == doctest::Approx(-0.475));
  CHECK(grid_power(p, 0.0) == 0.0);
  CHECK(grid_power(p, 0.5, EfficiencyMode::Inverter) == doctest::Approx(0.5 / 0.9025));
  double prev = grid_power(p, -0.5);
  for (int k = -49; k <= 50; ++k) {
    const double x = k / 100.0;
    const double g = grid_power(p, x);
    CHECK(g >= prev);
    if (x > 0) CHECK(g >= x);
    if (x < 0) CHECK(std::abs(g) <= std::abs(x));
    prev = g;
  }
}
