#include "doctest.h"

#include <random>

#include "ira/envelope.hpp"
#include "ira/error.hpp"

using namespace ira;

TEST_CASE("single link: unloaded line spans the ramp box") {
  const auto env = envelope_single_link({1000.0, {0.0}, 0.975}, -0.5, 0.5);
  CHECK(env.x_min_adj[0] == -0.5);
  CHECK(env.x_max_adj[0] == 0.5);
}

TEST_CASE("single link: near-saturated import caps charging from grid B") {
  const auto env = envelope_single_link({1000.0, {-999.8}, 0.975}, -0.5, 0.5);
  CHECK(env.x_max_adj[0] == doctest::Approx(0.2));
  CHECK(env.x_min_adj[0] == -0.5);
}

TEST_CASE("single link: saturated export blocks discharge toward grid B") {
  const auto env = envelope_single_link({1000.0, {1000.0}, 0.975}, -0.5, 0.5);
  CHECK(env.x_min_adj[0] == 0.0);
  CHECK(env.x_max_adj[0] == 0.5);
}

TEST_CASE("hoa: interval intersection") {
  const OperatingEnvelope be{{-0.5}, {0.2}};
  const OperatingEnvelope uk{{-0.1}, {0.5}};
  const auto env = intersect(be, uk);
  CHECK(env.x_min_adj[0] == -0.1);
  CHECK(env.x_max_adj[0] == 0.2);
}

TEST_CASE("hoa: UK link saturated toward BE closes the upper side") {
  const auto env = envelope_hoa({3500.0, {0.0}, 1.0}, {1400.0, {-1400.0}, 1.0}, -0.5, 0.5);
  CHECK(env.x_max_adj[0] == 0.0);
  CHECK(env.x_min_adj[0] == -0.5);
  const auto free = envelope_hoa({3500.0, {0.0}, 1.0}, {1400.0, {0.0}, 1.0}, -0.5, 0.5);
  CHECK(free.x_min_adj[0] == -0.5);
  CHECK(free.x_max_adj[0] == 0.5);
}

TEST_CASE("reserve capacity") {
  const auto closed = OperatingEnvelope::closed(3);
  const auto r0 = reserve_capacity(closed, 0.0, -0.5, 0.5);
  CHECK(r0.x_min_adj == closed.x_min_adj);
  CHECK(r0.x_max_adj == closed.x_max_adj);
  const auto r = reserve_capacity(closed, 0.25, -0.5, 0.5);
  CHECK(r.x_min_adj[1] == -0.25);
  CHECK(r.x_max_adj[1] == 0.25);
  const auto full = reserve_capacity(closed, 0.5, -0.5, 0.5);
  CHECK(full.x_min_adj[2] == -0.5);
  CHECK(full.x_max_adj[2] == 0.5);
  CHECK_THROWS_AS(reserve_capacity(closed, -0.1, -0.5, 0.5), ParameterError);
  CHECK_THROWS_AS(reserve_capacity(closed, 0.6, -0.5, 0.5), ParameterError);
}

TEST_CASE("envelope properties on random flows") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> flow(-1600.0, 1600.0);
  std::uniform_real_distribution<double> cap(0.1, 1500.0);
  std::uniform_real_distribution<double> res(0.0, 0.5);
  for (int trial = 0; trial < 500; ++trial) {
    LinkState link{cap(rng), {}, 1.0};
    for (int i = 0; i < 24; ++i) link.flow.push_back(flow(rng));
    const auto env = envelope_single_link(link, -0.5, 0.5);
    CHECK_NOTHROW(env.validate(-0.5, 0.5));

    LinkState looser = link;
    looser.l_max += 10.0;
    const auto wide = envelope_single_link(looser, -0.5, 0.5);
    for (std::size_t i = 0; i < env.size(); ++i) {
      CHECK(wide.x_min_adj[i] <= env.x_min_adj[i]);
      CHECK(wide.x_max_adj[i] >= env.x_max_adj[i]);
    }

    LinkState other{cap(rng), link.flow, 1.0};
    const auto hoa = envelope_hoa(link, other, -0.5, 0.5);
    CHECK_NOTHROW(hoa.validate(-0.5, 0.5));

    const double a = res(rng);
    const double b = res(rng);
    const auto ra = reserve_capacity(hoa, std::min(a, b), -0.5, 0.5);
    const auto rb = reserve_capacity(hoa, std::max(a, b), -0.5, 0.5);
    CHECK_NOTHROW(rb.validate(-0.5, 0.5));
    for (std::size_t i = 0; i < env.size(); ++i) {
      CHECK(rb.x_min_adj[i] <= ra.x_min_adj[i]);
      CHECK(rb.x_max_adj[i] >= ra.x_max_adj[i]);
    }
  }
}

TEST_CASE("zero flow with a large line equals the full box") {
  const auto env = envelope_single_link({1000.0, std::vector<double>(5, 0.0), 1.0}, -0.5, 0.5);
  const auto full = OperatingEnvelope::full(5, -0.5, 0.5);
  CHECK(env.x_min_adj == full.x_min_adj);
  CHECK(env.x_max_adj == full.x_max_adj);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(envelope_single_link({0.0, {0.0}, 1.0}, -0.5, 0.5), ParameterError);
  CHECK_THROWS_AS(envelope_single_link({10.0, {0.0}, 1.0}, 0.1, 0.5), ParameterError);
  CHECK_THROWS_AS(intersect(OperatingEnvelope::closed(2), OperatingEnvelope::closed(3)), ShapeError);
}
