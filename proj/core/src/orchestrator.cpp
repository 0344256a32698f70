#include "uavsim/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavsim {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::association: return "association";
    case StopReason::deployment: return "deployment";
    case StopReason::rate: return "rate";
    case StopReason::max_iters: return "max_iters";
    case StopReason::degenerate: return "degenerate";
  }
  return "unknown";
}

Deployment random_deployment(const Scenario& sc, DeployMode mode, std::uint64_t seed) {
  Rng rng(seed);
  Deployment dep;
  dep.mode = mode;
  if (mode == DeployMode::array) {
    dep.daa.axis = sc.daa_axis;
    dep.daa.theta = rng.uniform(0.0, 2.0 * kPi);
    dep.daa.phi = rng.uniform(0.0, 2.0 * kPi);
    dep.daa.separation = rng.uniform(sc.daa_min_separation, sc.daa_max_separation);
    dep.daa.center = Vec3{rng.uniform(0.0, sc.region_x), rng.uniform(0.0, sc.region_y),
                          rng.uniform(sc.z_min, sc.z_max)};
    return dep;
  }
  dep.uav_pos.resize(sc.num_uavs);
  for (auto& p : dep.uav_pos) {
    p = Vec3{rng.uniform(0.0, sc.region_x), rng.uniform(0.0, sc.region_y),
             rng.uniform(sc.z_min, sc.z_max)};
  }
  return dep;
}

namespace {

// k-means over user ground positions: k-means++ seeding, then a few Lloyd
// rounds. Returns k centers (k <= number of users).
std::vector<Vec3> user_centers(const Scenario& sc, int k, Rng& rng) {
  const int nu = sc.num_users;
  std::vector<Vec3> centers;
  centers.reserve(k);
  auto sq_dist_to_nearest = [&](const Vec3& u) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& c : centers) {
      const double dx = u.x - c.x;
      const double dy = u.y - c.y;
      best = std::min(best, dx * dx + dy * dy);
    }
    return best;
  };
  centers.push_back(sc.users[static_cast<int>(rng.uniform(0.0, 1.0) * nu) % nu]);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    std::vector<double> w(nu);
    for (int u = 0; u < nu; ++u) total += w[u] = sq_dist_to_nearest(sc.users[u]);
    if (total <= 0.0) {
      centers.push_back(sc.users[static_cast<int>(rng.uniform(0.0, 1.0) * nu) % nu]);
      continue;
    }
    double pick = rng.uniform(0.0, total);
    int chosen = nu - 1;
    for (int u = 0; u < nu; ++u) {
      pick -= w[u];
      if (pick <= 0.0) {
        chosen = u;
        break;
      }
    }
    centers.push_back(sc.users[chosen]);
  }
  std::vector<int> owner(nu, 0);
  for (int round = 0; round < 10; ++round) {
    for (int u = 0; u < nu; ++u) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double dx = sc.users[u].x - centers[c].x;
        const double dy = sc.users[u].y - centers[c].y;
        const double d = dx * dx + dy * dy;
        if (d < best) {
          best = d;
          owner[u] = static_cast<int>(c);
        }
      }
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      double sx = 0.0;
      double sy = 0.0;
      int n = 0;
      for (int u = 0; u < nu; ++u) {
        if (owner[u] == static_cast<int>(c)) {
          sx += sc.users[u].x;
          sy += sc.users[u].y;
          ++n;
        }
      }
      if (n > 0) centers[c] = Vec3{sx / n, sy / n, 0.0};
    }
  }
  return centers;
}

}  // namespace

Deployment initial_deployment(const Scenario& sc, DeployMode mode, std::uint64_t seed) {
  if (sc.num_users == 0) return random_deployment(sc, mode, seed);
  Rng rng(seed);
  const double z0 = sc.z_min + 0.25 * (sc.z_max - sc.z_min);
  Deployment dep;
  dep.mode = mode;
  if (mode == DeployMode::array) {
    dep.daa.axis = sc.daa_axis;
    dep.daa.theta = rng.uniform(0.0, 2.0 * kPi);
    dep.daa.phi = rng.uniform(0.0, 2.0 * kPi);
    dep.daa.separation = rng.uniform(sc.daa_min_separation, sc.daa_max_separation);
    const std::vector<Vec3> c = user_centers(sc, 1, rng);
    dep.daa.center = Vec3{c[0].x, c[0].y, z0};
    return dep;
  }
  const int k = std::min(sc.num_uavs, sc.num_users);
  std::vector<Vec3> centers = k > 0 ? user_centers(sc, k, rng) : std::vector<Vec3>{};
  dep.uav_pos.resize(sc.num_uavs);
  for (int d = 0; d < sc.num_uavs; ++d) {
    if (d < k) {
      dep.uav_pos[d] = Vec3{centers[d].x, centers[d].y, z0};
    } else {
      dep.uav_pos[d] = Vec3{rng.uniform(0.0, sc.region_x), rng.uniform(0.0, sc.region_y),
                            rng.uniform(sc.z_min, sc.z_max)};
    }
  }
  return dep;
}

namespace {

constexpr std::uint64_t kTagDeployInit = 11;
constexpr std::uint64_t kTagAllocInit = 12;
constexpr std::uint64_t kTagPowerStep = 13;
constexpr std::uint64_t kTagPlaceStep = 14;

struct Candidate {
  Deployment dep;
  Allocation alloc;
  SinrReport report;
  double se = 0.0;
  bool feasible = false;
};

struct BestTracker {
  bool has_feasible = false;
  Candidate feasible;
  bool has_any = false;
  Candidate any;

  void consider(Candidate c) {
    if (!has_any || c.se > any.se) {
      has_any = true;
      any = c;
    }
    if (c.feasible && (!has_feasible || c.se > feasible.se)) {
      has_feasible = true;
      feasible = std::move(c);
    }
  }
};

double deploy_delta(const Scenario& sc, const Deployment& a, const Deployment& b) {
  const auto pa = transmitter_positions(a, sc.num_uavs);
  const auto pb = transmitter_positions(b, sc.num_uavs);
  double d = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) d = std::max(d, distance(pa[i], pb[i]));
  return d;
}

bool rate_stalled(double prev, double cur, double eps_rel) {
  return std::abs(cur - prev) <= eps_rel * std::max(std::abs(cur), 1e-12);
}

Candidate power_candidate(const Scenario& sc, const Deployment& dep, const FixedPointResult& fp,
                          const LinkGains& gains) {
  Candidate c;
  c.dep = dep;
  c.alloc = fp.alloc;
  c.report = fp.report;
  c.se = report_sum_rate_se(sc, gains, fp.report);
  // targets met or capped-and-flagged, budgets clamped: structurally feasible
  c.feasible = true;
  return c;
}

Solution finish(const Scenario& sc, BestTracker& best, Solution sol) {
  const Candidate& win = best.has_feasible ? best.feasible : best.any;
  sol.dep = win.dep;
  sol.alloc = win.alloc;
  sol.report = win.report;
  sol.sum_rate_se = win.se;
  sol.sum_rate_bps = win.se * sc.bandwidth_hz;
  sol.feasible = best.has_feasible;
  return sol;
}

}  // namespace

Solution solve_network(const EvalContext& ctx, DeployMode mode, std::uint64_t seed) {
  const Scenario& sc = ctx.scenario();
  EvalWorkspace ws;
  BestTracker best;
  Solution sol;

  Deployment dep = initial_deployment(sc, mode, derive_seed(seed, kTagDeployInit));
  std::vector<int> prev_assoc;
  double prev_rate = std::numeric_limits<double>::quiet_NaN();

  for (int i = 1; i <= sc.outer.max_iters; ++i) {
    sol.outer_iters = i;

    FixedPointResult fp =
        solve_power_association(ctx, dep, derive_seed(seed, kTagPowerStep, i), ws);
    sol.fp_iters_total += fp.iterations;
    Candidate pc = power_candidate(sc, dep, fp, ws.gains);
    best.consider(pc);

    if (i > 1 && fp.alloc.association == prev_assoc) {
      // the placement step never runs this round, so the power step's rate
      // stands in as the iteration's entry
      sol.rate_trace.push_back(pc.se);
      sol.stop = StopReason::association;
      return finish(sc, best, std::move(sol));
    }
    prev_assoc = fp.alloc.association;

    PlacementResult pb =
        solve_placement(ctx, dep, fp.alloc, derive_seed(seed, kTagPlaceStep, i), ws);
    sol.pso_iters_total += pb.iterations;
    if (pb.has_feasible) {
      best.consider(Candidate{pb.feasible_dep, pb.feasible_alloc, pb.feasible_eval.report,
                              pb.feasible_eval.sum_rate_se, true});
    }
    best.consider(Candidate{pb.dep, pb.alloc, pb.eval.report, pb.eval.sum_rate_se,
                            pb.eval.user_violations == 0 && pb.eval.backhaul_violations == 0});

    const double rate = pb.eval.sum_rate_se;
    sol.rate_trace.push_back(rate);
    const double moved = deploy_delta(sc, dep, pb.dep);
    dep = pb.dep;

    if (sc.num_uavs == 0) {
      sol.stop = StopReason::degenerate;
      return finish(sc, best, std::move(sol));
    }
    if (i > 1) {
      if (moved <= sc.outer.eps_deploy) {
        sol.stop = StopReason::deployment;
        return finish(sc, best, std::move(sol));
      }
      if (rate_stalled(prev_rate, rate, sc.outer.eps_rate)) {
        sol.stop = StopReason::rate;
        return finish(sc, best, std::move(sol));
      }
    }
    prev_rate = rate;
  }
  sol.stop = StopReason::max_iters;
  return finish(sc, best, std::move(sol));
}

Solution solve_network_reversed(const EvalContext& ctx, DeployMode mode, std::uint64_t seed) {
  const Scenario& sc = ctx.scenario();
  EvalWorkspace ws;
  BestTracker best;
  Solution sol;

  Deployment dep = initial_deployment(sc, mode, derive_seed(seed, kTagDeployInit));
  Allocation alloc = random_equal_allocation(sc, mode, derive_seed(seed, kTagAllocInit));
  std::vector<int> prev_assoc;
  double prev_rate = std::numeric_limits<double>::quiet_NaN();

  for (int i = 1; i <= sc.outer.max_iters; ++i) {
    sol.outer_iters = i;

    PlacementResult pb =
        solve_placement(ctx, dep, alloc, derive_seed(seed, kTagPlaceStep, i), ws);
    sol.pso_iters_total += pb.iterations;
    if (pb.has_feasible) {
      best.consider(Candidate{pb.feasible_dep, pb.feasible_alloc, pb.feasible_eval.report,
                              pb.feasible_eval.sum_rate_se, true});
    }
    best.consider(Candidate{pb.dep, pb.alloc, pb.eval.report, pb.eval.sum_rate_se,
                            pb.eval.user_violations == 0 && pb.eval.backhaul_violations == 0});
    const double moved = deploy_delta(sc, dep, pb.dep);
    dep = pb.dep;
    alloc = pb.alloc;
    if (i > 1 && sc.num_uavs > 0 && moved <= sc.outer.eps_deploy) {
      sol.stop = StopReason::deployment;
      return finish(sc, best, std::move(sol));
    }

    FixedPointResult fp =
        solve_power_association(ctx, dep, derive_seed(seed, kTagPowerStep, i), ws);
    sol.fp_iters_total += fp.iterations;
    best.consider(power_candidate(sc, dep, fp, ws.gains));
    alloc = fp.alloc;

    const double rate = report_sum_rate_se(sc, ws.gains, fp.report);
    sol.rate_trace.push_back(rate);

    if (sc.num_uavs == 0) {
      sol.stop = StopReason::degenerate;
      return finish(sc, best, std::move(sol));
    }
    if (i > 1) {
      if (fp.alloc.association == prev_assoc) {
        sol.stop = StopReason::association;
        return finish(sc, best, std::move(sol));
      }
      if (rate_stalled(prev_rate, rate, sc.outer.eps_rate)) {
        sol.stop = StopReason::rate;
        return finish(sc, best, std::move(sol));
      }
    }
    prev_assoc = fp.alloc.association;
    prev_rate = rate;
  }
  sol.stop = StopReason::max_iters;
  return finish(sc, best, std::move(sol));
}

}  // namespace uavsim
