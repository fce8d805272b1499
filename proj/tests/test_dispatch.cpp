#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "ira/dispatch.hpp"
#include "ira/error.hpp"
#include "ira/synthetic.hpp"

using namespace ira;

namespace {

constexpr std::size_t be = static_cast<std::size_t>(Node::BE);
constexpr std::size_t ei = static_cast<std::size_t>(Node::EI);
constexpr std::size_t uk = static_cast<std::size_t>(Node::UK);

SyntheticDataset day() {
  SyntheticOptions o;
  o.days = 1;
  return make_synthetic(o);
}

DispatchCase toy_case(const Case2Options& options = {}, double wind_scale = 1.0) {
  const auto d = day();
  std::vector<double> wind = d.wind;
  for (double& w : wind) w *= wind_scale;
  return build_case2(d.price_a, d.price_b, d.demand_a, d.demand_b, wind, options);
}

Case2Options isolated() {
  Case2Options o;
  o.nemo_capacity = o.nautilus_uk_capacity = o.nautilus_be_capacity = o.hvac_capacity = 0.0;
  return o;
}

Case2Options slack() {
  Case2Options o;
  o.nemo_capacity = o.nautilus_uk_capacity = o.nautilus_be_capacity = o.hvac_capacity = 1e6;
  return o;
}

}  // namespace

TEST_CASE("case construction") {
  const std::vector<double> p_be{40, 50}, p_uk{45, 55}, d_be{8500, 500}, d_uk{30000, 20000}, wind{0, 0};
  const auto c = build_case2(p_be, p_uk, d_be, d_uk, wind);
  REQUIRE(c.generators.size() == 5);
  const auto& g4 = c.generators[3];
  CHECK(g4.id == "g4");
  CHECK(g4.node == Node::BE);
  CHECK(g4.capacity == std::vector<double>{7500, 0});
  CHECK(g4.price[0] == doctest::Approx(0.95 * 40));
  CHECK(g4.price[1] == doctest::Approx(0.95 * 50));
  const auto& owpp = c.generators[4];
  CHECK(owpp.capacity == std::vector<double>{0, 0});
  CHECK(owpp.price[1] == doctest::Approx(0.95 * 50));
  CHECK(c.generators[0].capacity[0] == doctest::Approx(10 * 30000));
  CHECK(c.lines.size() == 4);
  CHECK(c.lines[0].capacity == 1000);
  CHECK(c.lines[3].capacity == 2100);

  Case2Options alt;
  alt.block_rule = BlockRule::BlockSize;
  CHECK(build_case2(p_be, p_uk, d_be, d_uk, wind, alt).generators[3].capacity == std::vector<double>{1000, 1000});

  const std::vector<double> neg{-1, 0};
  CHECK_THROWS_AS(build_case2(p_be, p_uk, neg, d_uk, wind), DataError);
  CHECK_THROWS_AS(build_case2(p_be, p_uk, d_be, d_uk, neg), DataError);
  CHECK_THROWS_AS(build_case2(p_be, p_uk, d_be, d_uk, std::vector<double>{0}), ShapeError);
  Case2Options rated;
  rated.wind_rating = 100;
  CHECK_THROWS_AS(build_case2(p_be, p_uk, d_be, d_uk, std::vector<double>{0, 200}, rated), DataError);
}

TEST_CASE("balance and complementary slackness on a day") {
  const auto c = toy_case();
  const auto r = clear_market(c);
  REQUIRE(r.hours() == 24);
  CHECK(r.max_balance_residual <= 1e-6);
  CHECK(r.max_complementarity <= 1e-6);
  CHECK(r.max_dual_infeasibility <= 1e-6);
  for (std::size_t h = 0; h < 24; ++h) {
    double gen = 0.0, demand = 0.0, cost = 0.0;
    for (std::size_t g = 0; g < c.generators.size(); ++g) {
      gen += r.generation[g][h];
      cost += c.generators[g].price[h] * r.generation[g][h];
    }
    for (std::size_t n = 0; n < kNodeCount; ++n) demand += c.demand[n][h];
    CHECK(gen == doctest::Approx(demand).epsilon(1e-9));
    CHECK(cost == doctest::Approx(r.hourly_cost[h]).epsilon(1e-9));
  }
}

TEST_CASE("isolated zones without wind price at their historical series") {
  const auto d = day();
  const auto r = clear_market(toy_case(isolated(), 0.0));
  for (std::size_t h = 0; h < 24; ++h) {
    CHECK(r.prices[be][h] == doctest::Approx(d.price_a[h]).epsilon(1e-9));
    CHECK(r.prices[uk][h] == doctest::Approx(d.price_b[h]).epsilon(1e-9));
  }
  for (const auto& f : r.flows) {
    for (double v : f) CHECK(v == 0.0);
  }
}

TEST_CASE("slack lines collapse all nodes to the cheapest marginal price") {
  const auto d = day();
  const auto r = clear_market(toy_case(slack(), 0.0));
  for (std::size_t h = 0; h < 24; ++h) {
    const double cheapest = std::min(d.price_a[h], d.price_b[h]);
    for (std::size_t n = 0; n < kNodeCount; ++n) CHECK(r.prices[n][h] == doctest::Approx(cheapest).epsilon(1e-9));
  }
}

TEST_CASE("curtailed wind sets the island price at its bid") {
  const auto d = day();
  const std::vector<double> wind(24, 10000.0);
  const auto r = clear_market(build_case2(d.price_a, d.price_b, d.demand_a, d.demand_b, wind));
  const auto flows = extract_hoa_flows(r);
  for (std::size_t h = 0; h < 24; ++h) {
    CHECK(r.generation[4][h] < 10000.0);
    CHECK(r.prices[ei][h] == doctest::Approx(0.95 * d.price_a[h]).epsilon(1e-9));
    if (d.price_b[h] > 0.95 * d.price_a[h] + 1e-6) CHECK(flows.uk_side[h] == doctest::Approx(1400.0));
    CHECK(flows.be_side[h] >= -3500.0 - 1e-9);
  }
}

TEST_CASE("island transit balances without wind") {
  const auto r = clear_market(toy_case({}, 0.0));
  const auto flows = extract_hoa_flows(r);
  for (std::size_t h = 0; h < 24; ++h) CHECK(flows.be_side[h] == doctest::Approx(flows.uk_side[h]).epsilon(1e-9));
  CHECK_THROWS_AS(extract_flows(r, "no_such_line"), LookupError);
  CHECK(extract_flows(r, kLineNemo).size() == 24);
}

TEST_CASE("more wind never raises total cost") {
  double previous = std::numeric_limits<double>::infinity();
  for (double scale : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double cost = clear_market(toy_case({}, scale)).total_cost;
    CHECK(cost <= previous + 1e-6);
    previous = cost;
  }
}

TEST_CASE("parallel hours equal the serial reference") {
  SyntheticOptions o;
  o.days = 3;
  const auto d = make_synthetic(o);
  const auto c = build_case2(d.price_a, d.price_b, d.demand_a, d.demand_b, d.wind);
  const auto a = clear_market(c);
  const auto b = clear_market_serial(c);
  CHECK(a.prices == b.prices);
  CHECK(a.flows == b.flows);
  CHECK(a.total_cost == b.total_cost);
  CHECK(a.tied == b.tied);

  const auto part = clear_market(c, 24, 48);
  CHECK(part.hours() == 24);
  CHECK(part.first_hour == 24);
  CHECK(part.prices[0][0] == a.prices[0][24]);
  CHECK_THROWS_AS(clear_market(c, 50, 10), ParameterError);
}

TEST_CASE("unservable demand names the hour") {
  DispatchCase c;
  c.demand[be] = {10, 10};
  c.demand[ei] = {0, 5};
  c.demand[uk] = {0, 0};
  c.generators.push_back({"g", Node::BE, GeneratorKind::Infinite, {1, 1}, {100, 100}});
  c.lines.push_back({"l", Node::BE, Node::EI, 1.0});
  try {
    clear_market_serial(c);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("hour 1") != std::string::npos);
  }
}

TEST_CASE("dispatch csv") {
  const auto r = clear_market(toy_case());
  const auto path = std::filesystem::temp_directory_path() / "ira_test_dispatch.csv";
  write_dispatch_csv(path, r, {});
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "timestamp,price_be,price_ei,price_uk,flow_nemo,flow_nautilus_uk,flow_nautilus_be,flow_hvac,tied");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 24);
  std::filesystem::remove(path);
}
