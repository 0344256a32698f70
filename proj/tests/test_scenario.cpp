#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "uavsim/rng.hpp"
#include "uavsim/scenario.hpp"
#include "uavsim/types.hpp"

using namespace uavsim;

TEST_CASE("default scenario is valid and matches the reference configuration") {
  Scenario sc;
  CHECK_NOTHROW(validate(sc));
  CHECK(sc.n_antennas == 64);
  CHECK(sc.num_uavs == 4);
  CHECK(sc.num_users == 25);
  CHECK(sc.donor_budget_watt == doctest::Approx(dbm_to_watt(46.0)).epsilon(1e-15));
  CHECK(sc.uav_budget_watt == doctest::Approx(dbm_to_watt(36.0)).epsilon(1e-15));
  CHECK(sc.noise_watt == doctest::Approx(dbm_to_watt(-104.0)).epsilon(1e-15));
  CHECK(sc.eps_user == doctest::Approx(db_to_linear(3.0)).epsilon(1e-15));
  CHECK(sc.bandwidth_hz == 20e6);
  CHECK(sc.channel.num_paths == 6);
  CHECK(sc.channel.pathloss_exponent == 3.0);
}

TEST_CASE("empty config document reproduces the defaults") {
  const Scenario sc = parse_scenario("{}");
  const Scenario ref;
  CHECK(sc.donor_pos.x == ref.donor_pos.x);
  CHECK(sc.region_x == ref.region_x);
  CHECK(sc.region_y == ref.region_y);
  CHECK(sc.num_users == ref.num_users);
  CHECK(sc.num_uavs == ref.num_uavs);
  CHECK(sc.donor_budget_watt == ref.donor_budget_watt);
  CHECK(sc.eps_user == ref.eps_user);
  CHECK(sc.swarm.swarm_size == ref.swarm.swarm_size);
  CHECK(sc.outer.max_iters == ref.outer.max_iters);
}

TEST_CASE("config units convert from dBm, dB and degrees") {
  const Scenario sc = parse_scenario(R"({
    "budgets": {"donor_max_dbm": 40.0, "uav_max_dbm": 30.0},
    "thresholds": {"user_min_sinr_db": 0.0, "backhaul_min_sinr_db": 10.0},
    "noise_dbm": -90.0,
    "channel": {"asd_deg": 10.0}
  })");
  CHECK(sc.donor_budget_watt == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(sc.uav_budget_watt == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sc.eps_user == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sc.eps_backhaul == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(sc.noise_watt == doctest::Approx(1e-12).epsilon(1e-14));
  CHECK(sc.channel.asd_rad == doctest::Approx(10.0 * kPi / 180.0).epsilon(1e-14));
}

TEST_CASE("solver arrays parse as [end, start] inertia and [lo, hi] spread") {
  const Scenario sc = parse_scenario(R"({
    "solver": {
      "swarm": {"inertia": [0.2, 1.0], "spread": [0.7, 1.3], "size": 50},
      "fixed_point": {"max_iters": 99},
      "outer": {"eps_deploy_m": 2.5}
    }
  })");
  CHECK(sc.swarm.inertia_end == 0.2);
  CHECK(sc.swarm.inertia_start == 1.0);
  CHECK(sc.swarm.spread_lo == 0.7);
  CHECK(sc.swarm.spread_hi == 1.3);
  CHECK(sc.swarm.swarm_size == 50);
  CHECK(sc.fp.max_iters == 99);
  CHECK(sc.outer.eps_deploy == 2.5);
}

TEST_CASE("explicit user positions override the generated count") {
  const Scenario sc = parse_scenario(R"({
    "users": {"count": 99, "positions_m": [[10, 20, 1.5], [30, 40, 1.5], [50, 60, 1.5]]}
  })");
  const Scenario realized = realize_layout(sc, 1);
  CHECK(realized.num_users == 3);
  REQUIRE(realized.users.size() == 3);
  CHECK(realized.users[1].x == 30.0);
  CHECK(realized.users[1].y == 40.0);
  CHECK(realized.users[2].z == 1.5);
}

TEST_CASE("distribution and axis names parse") {
  CHECK(parse_scenario(R"({"users": {"distribution": "dual_cluster"}})").distribution ==
        UserDistribution::dual_cluster);
  CHECK(parse_scenario(R"({"users": {"distribution": "generic"}})").distribution ==
        UserDistribution::generic);
  CHECK(parse_scenario(R"({"daa": {"axis": "spherical"}})").daa_axis == DaaAxis::spherical);
  CHECK_THROWS_AS(parse_scenario(R"({"users": {"distribution": "ring"}})"), ValidationError);
  CHECK_THROWS_AS(parse_scenario(R"({"daa": {"axis": "diagonal"}})"), ValidationError);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_AS(parse_scenario(R"({"bogus": 1})"), ValidationError);
  CHECK_THROWS_AS(parse_scenario(R"({"channel": {"bogus": 1}})"), ValidationError);
  CHECK_THROWS_AS(parse_scenario(R"({"solver": {"swarm": {"speed": 3}}})"), ValidationError);
}

TEST_CASE("malformed documents raise a parse error") {
  CHECK_THROWS_AS(parse_scenario("{"), ParseError);
  CHECK_THROWS_AS(parse_scenario("[1, 2, 3]"), ParseError);
}

TEST_CASE("validation rejects inconsistent scenarios") {
  Scenario sc;
  sc.z_min = 0.0;
  CHECK_THROWS_AS(validate(sc), ValidationError);

  sc = Scenario{};
  sc.num_uavs = 8;
  sc.n_antennas = 8;  // needs at least num_uavs + 1
  CHECK_THROWS_AS(validate(sc), ValidationError);

  sc = Scenario{};
  sc.clustered_fraction = 1.5;
  CHECK_THROWS_AS(validate(sc), ValidationError);

  sc = Scenario{};
  sc.donor_pos = {9999.0, 250.0, 25.0};
  CHECK_THROWS_AS(validate(sc), ValidationError);

  sc = Scenario{};
  sc.swarm.window = 1;
  CHECK_THROWS_AS(validate(sc), ValidationError);

  sc = Scenario{};
  sc.users = {{-5.0, 10.0, 1.5}};
  CHECK_THROWS_AS(validate(sc), ValidationError);
}

TEST_CASE("dual-cluster layout puts three quarters of users on a remote hotspot") {
  Scenario sc;
  sc.num_users = 24;
  sc.distribution = UserDistribution::dual_cluster;
  const Scenario out = realize_layout(sc, 4242);
  REQUIRE(out.users.size() == 24);

  const int hot = 18;  // round(0.75 * 24)
  Vec3 centroid{0.0, 0.0, 0.0};
  for (int i = 0; i < hot; ++i) {
    centroid.x += out.users[i].x / hot;
    centroid.y += out.users[i].y / hot;
  }
  // The hotspot lives in the outer half of the region...
  const double donor_dist = std::hypot(centroid.x - sc.donor_pos.x, centroid.y - sc.donor_pos.y);
  CHECK(donor_dist > 150.0);
  // ...its users huddle around it...
  for (int i = 0; i < hot; ++i) {
    CHECK(std::hypot(out.users[i].x - centroid.x, out.users[i].y - centroid.y) < 100.0);
  }
  // ...and the remainder stays near the donor.
  for (int i = hot; i < 24; ++i) {
    CHECK(std::hypot(out.users[i].x - sc.donor_pos.x, out.users[i].y - sc.donor_pos.y) < 250.0);
  }
}

TEST_CASE("generated layouts respect the region and user height") {
  for (UserDistribution dist : {UserDistribution::dual_cluster, UserDistribution::multi_cluster,
                                UserDistribution::generic}) {
    Scenario sc;
    sc.distribution = dist;
    sc.num_users = 30;
    const Scenario out = realize_layout(sc, 7);
    REQUIRE(out.users.size() == 30);
    for (const Vec3& u : out.users) {
      CHECK(u.x >= 0.0);
      CHECK(u.x <= sc.region_x);
      CHECK(u.y >= 0.0);
      CHECK(u.y <= sc.region_y);
      CHECK(u.z == sc.user_height);
    }
    CHECK_NOTHROW(validate(out));
  }
}

TEST_CASE("layout generation is seed-deterministic") {
  Scenario sc;
  sc.distribution = UserDistribution::multi_cluster;
  const Scenario a = realize_layout(sc, 99);
  const Scenario b = realize_layout(sc, 99);
  const Scenario c = realize_layout(sc, 100);
  REQUIRE(a.users.size() == b.users.size());
  for (std::size_t i = 0; i < a.users.size(); ++i) {
    CHECK(a.users[i].x == b.users[i].x);
    CHECK(a.users[i].y == b.users[i].y);
  }
  bool any_diff = false;
  for (std::size_t i = 0; i < a.users.size(); ++i) {
    if (a.users[i].x != c.users[i].x || a.users[i].y != c.users[i].y) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("cluster centers land in the outer half of the region") {
  // With a tiny spread, every user sits within a few meters of its cluster
  // center, so the center distance bound is observable from the users.
  Scenario sc;
  sc.distribution = UserDistribution::multi_cluster;
  sc.cluster_stddev = 1.0;
  sc.num_users = 20;
  const Scenario out = realize_layout(sc, 31);
  const double min_dist = 0.5 * std::hypot(sc.region_x / 2.0, sc.region_y / 2.0);
  for (const Vec3& u : out.users) {
    const double d = std::hypot(u.x - sc.donor_pos.x, u.y - sc.donor_pos.y);
    CHECK(d > min_dist - 8.0);
  }
}
