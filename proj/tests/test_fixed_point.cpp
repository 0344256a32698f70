#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "uavsim/fixed_point.hpp"
#include "uavsim/network.hpp"

using namespace uavsim;

namespace {

// A deliberately comfortable instance: two users close to the donor, two
// remote users each hugged by a drone that itself sits well inside the
// donor's backhaul reach. Powers converge far below every budget. Azimuths
// are chosen so no user shares a sin(azimuth) with a backhaul stream: the
// donor's horizontal line array cannot separate directions with equal sines
// (theta aliases pi - theta), and feed beams would crush an aligned user.
Scenario easy_scenario() {
  Scenario sc;
  sc.num_uavs = 2;
  sc.n_antennas = 16;
  sc.users = {{156.03, 215.80, 1.5},     // 100 m from the donor, azimuth 200 deg
              {307.36, 168.08, 1.5},     // 100 m, azimuth 305 deg
              {354.67, 383.96, 1.5},     // 170 m, azimuth 52 deg, near drone 0
              {159.92, 394.16, 1.5}};    // 170 m, azimuth 122 deg, near drone 1
  sc.num_users = static_cast<int>(sc.users.size());
  return sc;
}

Deployment easy_deployment() {
  Deployment dep;
  dep.mode = DeployMode::distributed;
  // 150 m out at azimuths 45 and 115 degrees, ~28 m ground offset from their
  // remote users
  dep.uav_pos = {{356.07, 356.07, 60.0}, {186.61, 385.95, 60.0}};
  return dep;
}

// Interference sums spelled out directly from the gain tables, independent of
// the helpers the solver itself uses. Powers of user `skip` are left out of
// every cell sum (the hypothetical-move convention).
double cell_user_power(const Allocation& a, int cell, int skip) {
  double s = 0.0;
  for (std::size_t v = 0; v < a.user_power.size(); ++v) {
    if (static_cast<int>(v) == skip) continue;
    if (a.association[v] == cell) s += a.user_power[v];
  }
  return s;
}

double local_drone_interference(const LinkGains& g, const Allocation& a, int user,
                                int serving_cell, int skip) {
  double s = 0.0;
  for (int d = 0; d < g.num_uavs; ++d) {
    if (d == serving_cell) continue;
    s += cell_user_power(a, d, skip) * g.access(d, user);
  }
  return s;
}

double local_donor_leak(const LinkGains& g, const Allocation& a, int user, int skip) {
  if (g.resources == 0) return 0.0;
  double total = 0.0;
  for (int r = 0; r < g.resources; ++r) {
    for (int d = 0; d < g.num_uavs; ++d) {
      total += a.backhaul_power[d] * g.leak(user, r, d);
    }
    if (g.streams > g.num_uavs && g.tue[r] != skip) {
      total += a.user_power[g.tue[r]] * g.leak(user, r, g.num_uavs);
    }
  }
  return total / g.resources;
}

}  // namespace

TEST_CASE("candidate cell lists cover the donor and every serving option") {
  const std::vector<int> dist3 = candidate_cells(DeployMode::distributed, 3);
  CHECK(dist3 == std::vector<int>{kDonorCell, 0, 1, 2});

  const std::vector<int> arr = candidate_cells(DeployMode::array, 4);
  CHECK(arr == std::vector<int>{kDonorCell, 0});

  CHECK(candidate_cells(DeployMode::distributed, 0) == std::vector<int>{kDonorCell});
  CHECK(candidate_cells(DeployMode::array, 0) == std::vector<int>{kDonorCell});
}

TEST_CASE("random equal allocation splits each cell budget exactly") {
  Scenario sc = easy_scenario();

  SUBCASE("distributed") {
    const Allocation a = random_equal_allocation(sc, DeployMode::distributed, 42);
    REQUIRE(a.association.size() == 4);
    REQUIRE(a.user_power.size() == 4);
    REQUIRE(a.backhaul_power.size() == 2);

    for (int cell : a.association) {
      CHECK(cell >= kDonorCell);
      CHECK(cell < sc.num_uavs);
    }

    // Donor-side entries (direct users and backhaul streams) share one value.
    int donor_users = 0;
    for (std::size_t u = 0; u < a.association.size(); ++u) {
      if (a.association[u] == kDonorCell) ++donor_users;
    }
    const double donor_share = sc.donor_budget_watt / (donor_users + sc.num_uavs);
    for (std::size_t u = 0; u < a.association.size(); ++u) {
      if (a.association[u] == kDonorCell) {
        CHECK(a.user_power[u] == doctest::Approx(donor_share).epsilon(1e-12));
      }
    }
    double donor_total = 0.0;
    for (double p : a.backhaul_power) {
      CHECK(p == doctest::Approx(donor_share).epsilon(1e-12));
      donor_total += p;
    }
    for (std::size_t u = 0; u < a.association.size(); ++u) {
      if (a.association[u] == kDonorCell) donor_total += a.user_power[u];
    }
    CHECK(donor_total == doctest::Approx(sc.donor_budget_watt).epsilon(1e-12));

    // Each drone splits its own budget across its users.
    for (int d = 0; d < sc.num_uavs; ++d) {
      int count = 0;
      for (int cell : a.association) {
        if (cell == d) ++count;
      }
      if (count == 0) continue;
      const double share = sc.uav_budget_watt / count;
      double total = 0.0;
      for (std::size_t u = 0; u < a.association.size(); ++u) {
        if (a.association[u] == d) {
          CHECK(a.user_power[u] == doctest::Approx(share).epsilon(1e-12));
          total += a.user_power[u];
        }
      }
      CHECK(total == doctest::Approx(sc.uav_budget_watt).epsilon(1e-12));
    }

    const Allocation again = random_equal_allocation(sc, DeployMode::distributed, 42);
    CHECK(again.association == a.association);
    CHECK(again.user_power == a.user_power);
    CHECK(again.backhaul_power == a.backhaul_power);
  }

  SUBCASE("array pools every element budget") {
    sc.num_uavs = 4;
    const Allocation a = random_equal_allocation(sc, DeployMode::array, 9);
    REQUIRE(a.backhaul_power.size() == 4);
    int array_users = 0;
    for (int cell : a.association) {
      CHECK((cell == kDonorCell || cell == 0));
      if (cell == 0) ++array_users;
    }
    if (array_users > 0) {
      const double share = 4.0 * sc.uav_budget_watt / array_users;
      double total = 0.0;
      for (std::size_t u = 0; u < a.association.size(); ++u) {
        if (a.association[u] == 0) {
          CHECK(a.user_power[u] == doctest::Approx(share).epsilon(1e-12));
          total += a.user_power[u];
        }
      }
      CHECK(total == doctest::Approx(4.0 * sc.uav_budget_watt).epsilon(1e-12));
    }
  }
}

TEST_CASE("unity power matrix matches hand-built interference quotients") {
  const Scenario sc = easy_scenario();
  const Deployment dep = easy_deployment();
  EvalContext ctx(sc, 314159);
  EvalWorkspace ws;

  Allocation prev;
  prev.association = {kDonorCell, 0, 0, 1};
  prev.user_power = {0.02, 0.003, 0.005, 0.004};
  prev.backhaul_power = {0.8, 0.9};
  compute_link_gains(ctx, dep, prev.association, ws);
  const LinkGains& g = ws.gains;

  const auto m = unity_power_matrix(ctx, ws, prev);
  REQUIRE(m.size() == 3);  // donor + two drones
  REQUIRE(m[0].size() == 4);

  for (int u = 0; u < 4; ++u) {
    // Donor row: direct-link gain against every drone's access traffic.
    double interf = 0.0;
    for (int d = 0; d < 2; ++d) interf += cell_user_power(prev, d, u) * g.access(d, u);
    const double want_donor = (sc.noise_watt + interf) / g.direct_gain[u];
    CHECK(m[0][u] == doctest::Approx(want_donor).epsilon(1e-12));

    // Drone rows: access gain against the other drones plus the donor leak.
    for (int c = 0; c < 2; ++c) {
      const double other = local_drone_interference(g, prev, u, c, u);
      const double leak = local_donor_leak(g, prev, u, u);
      const double want = (sc.noise_watt + other + leak) / g.access(c, u);
      CHECK(m[c + 1][u] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("fixed point converges to the target SINRs on a feasible instance") {
  const Scenario sc = easy_scenario();
  const Deployment dep = easy_deployment();
  EvalContext ctx(sc, 2024);
  EvalWorkspace ws;

  const FixedPointResult res = solve_power_association(ctx, dep, 77, ws);

  REQUIRE(res.converged);
  CHECK(res.iterations <= sc.fp.max_iters);
  CHECK(static_cast<int>(res.max_power_delta.size()) == res.iterations);
  CHECK(static_cast<int>(res.max_backhaul_delta.size()) == res.iterations);
  CHECK(static_cast<int>(res.assoc_changes.size()) == res.iterations);
  CHECK(static_cast<int>(res.power_trace.size()) == res.iterations);
  CHECK(res.max_power_delta.back() <= sc.fp.eps_power);
  CHECK(res.max_backhaul_delta.back() <= sc.fp.eps_backhaul);
  CHECK(res.assoc_changes.back() == 0);

  // Geometry makes the association unambiguous: near users ride the donor,
  // each remote user its adjacent drone.
  CHECK(res.alloc.association == std::vector<int>{kDonorCell, kDonorCell, 0, 1});

  // Nothing is capped here, so every user and both backhaul streams sit on
  // the threshold, and no one is in outage.
  for (int u = 0; u < 4; ++u) {
    CHECK_FALSE(res.report.outage[u]);
    CHECK(res.report.user[u] == doctest::Approx(sc.eps_user).epsilon(1e-3));
  }
  for (int d = 0; d < 2; ++d) {
    CHECK_FALSE(res.report.gated[d]);
    CHECK(res.report.backhaul[d] >= sc.eps_backhaul * (1.0 - 1e-3));
  }

  // The last trace row is the returned allocation.
  const std::vector<double>& last = res.power_trace.back();
  REQUIRE(last.size() == 6);
  for (int u = 0; u < 4; ++u) CHECK(last[u] == res.alloc.user_power[u]);
  CHECK(last[4] == res.alloc.backhaul_power[0]);
  CHECK(last[5] == res.alloc.backhaul_power[1]);

  CHECK(audit_allocation(ctx, dep, res.alloc, res.report).ok);
}

TEST_CASE("converged allocation is a fixed point of its own update") {
  const Scenario sc = easy_scenario();
  const Deployment dep = easy_deployment();
  EvalContext ctx(sc, 555);
  EvalWorkspace ws;

  const FixedPointResult res = solve_power_association(ctx, dep, 3, ws);
  REQUIRE(res.converged);

  compute_link_gains(ctx, dep, res.alloc.association, ws);
  const auto m = unity_power_matrix(ctx, ws, res.alloc);
  const auto cells = candidate_cells(DeployMode::distributed, sc.num_uavs);

  for (int u = 0; u < 4; ++u) {
    // Re-selecting the cheapest cell reproduces the converged association...
    int best = 0;
    for (std::size_t r = 1; r < m.size(); ++r) {
      if (m[r][u] < m[best][u]) best = static_cast<int>(r);
    }
    CHECK(cells[best] == res.alloc.association[u]);

    // ...and re-applying the power update reproduces the converged power.
    const double expected = sc.eps_user * m[best][u];
    CHECK(std::abs(expected - res.alloc.user_power[u]) <= 1e-5);
  }
}

TEST_CASE("fixed point is insensitive to the random starting association") {
  const Scenario sc = easy_scenario();
  const Deployment dep = easy_deployment();
  EvalContext ctx(sc, 909);
  EvalWorkspace ws;

  const FixedPointResult a = solve_power_association(ctx, dep, 1, ws);
  const FixedPointResult b = solve_power_association(ctx, dep, 2, ws);
  const FixedPointResult c = solve_power_association(ctx, dep, 1, ws);

  REQUIRE(a.converged);
  REQUIRE(b.converged);

  // Identical seed: bit-identical run.
  CHECK(a.alloc.user_power == c.alloc.user_power);
  CHECK(a.alloc.backhaul_power == c.alloc.backhaul_power);
  CHECK(a.iterations == c.iterations);

  // Different seed: same fixed point within the convergence tolerance.
  CHECK(a.alloc.association == b.alloc.association);
  for (int u = 0; u < 4; ++u) {
    CHECK(std::abs(a.alloc.user_power[u] - b.alloc.user_power[u]) <= 1e-5);
  }
  for (int d = 0; d < 2; ++d) {
    CHECK(std::abs(a.alloc.backhaul_power[d] - b.alloc.backhaul_power[d]) <= 1e-5);
  }
}

TEST_CASE("unreachable user is capped at the cell budget and flagged") {
  Scenario sc = easy_scenario();
  sc.region_x = 6000.0;
  sc.region_y = 6000.0;
  sc.users.push_back({5900.0, 5900.0, 1.5});  // ~8 km from everything
  sc.num_users = 5;
  const Deployment dep = easy_deployment();
  EvalContext ctx(sc, 11);
  EvalWorkspace ws;

  const FixedPointResult res = solve_power_association(ctx, dep, 5, ws);
  REQUIRE(res.converged);

  CHECK(res.report.outage[4]);
  CHECK(res.report.user[4] < sc.eps_user);
  // The stranded user burns its serving cell's whole per-user cap.
  const int cell = res.alloc.association[4];
  const double cap = cell_budget(sc, DeployMode::distributed, cell);
  int members = 0;
  for (int c : res.alloc.association) {
    if (c == cell) ++members;
  }
  CHECK(res.alloc.user_power[4] == doctest::Approx(cap / members).epsilon(1e-9));

  // The reachable users still converge to target, and the audit accepts the
  // solution because the capped user is marked.
  for (int u = 0; u < 4; ++u) {
    CHECK_FALSE(res.report.outage[u]);
    CHECK(res.report.user[u] == doctest::Approx(sc.eps_user).epsilon(1e-3));
  }
  CHECK(audit_allocation(ctx, dep, res.alloc, res.report).ok);
}

TEST_CASE("array-mode fixed point serves remote users through the array") {
  Scenario sc = easy_scenario();
  sc.num_uavs = 4;
  sc.users = {{156.03, 215.80, 1.5},
              {307.36, 168.08, 1.5},
              {400.0, 240.0, 1.5},
              {400.0, 262.0, 1.5}};
  sc.num_users = 4;

  Deployment dep;
  dep.mode = DeployMode::array;
  // axis along y, broadside to the donor: the four elements spread 15 deg of
  // azimuth as seen from the donor, so the feed streams stay separable
  dep.daa.center = {360.0, 250.0, 60.0};
  dep.daa.theta = kPi / 2.0;
  dep.daa.phi = 0.0;
  dep.daa.separation = 20.0;

  EvalContext ctx(sc, 88);
  EvalWorkspace ws;
  const FixedPointResult res = solve_power_association(ctx, dep, 21, ws);

  REQUIRE(res.converged);
  CHECK(res.alloc.association ==
        std::vector<int>{kDonorCell, kDonorCell, 0, 0});
  for (int u = 0; u < 4; ++u) {
    CHECK_FALSE(res.report.outage[u]);
    CHECK(res.report.user[u] == doctest::Approx(sc.eps_user).epsilon(1e-3));
  }
  REQUIRE(res.report.backhaul.size() == 4);
  for (int e = 0; e < 4; ++e) {
    CHECK_FALSE(res.report.gated[e]);
    CHECK(res.report.backhaul[e] >= sc.eps_backhaul * (1.0 - 1e-3));
  }
  CHECK(audit_allocation(ctx, dep, res.alloc, res.report).ok);
}
