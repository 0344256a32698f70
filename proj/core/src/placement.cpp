#include "uavsim/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavsim {

Bounds PlacementSpace::bounds(const Scenario& sc, const std::vector<int>& association) const {
  Bounds b;
  const int n = dims();
  b.lo.assign(n, 0.0);
  b.hi.assign(n, 0.0);
  b.wrap.assign(n, false);
  int k = 0;
  if (mode == DeployMode::array) {
    b.lo[0] = 0.0;
    b.hi[0] = 2.0 * kPi;
    b.wrap[0] = true;  // horizontal rotation
    b.lo[1] = 0.0;
    b.hi[1] = 2.0 * kPi;
    b.wrap[1] = true;  // tilt
    b.lo[2] = sc.daa_min_separation;
    b.hi[2] = sc.daa_max_separation;
    b.lo[3] = 0.0;
    b.hi[3] = sc.region_x;
    b.lo[4] = 0.0;
    b.hi[4] = sc.region_y;
    b.lo[5] = sc.z_min;
    b.hi[5] = sc.z_max;
    k = 6;
  } else {
    for (int d = 0; d < num_uavs; ++d) {
      b.lo[k] = 0.0;
      b.hi[k] = sc.region_x;
      ++k;
      b.lo[k] = 0.0;
      b.hi[k] = sc.region_y;
      ++k;
      b.lo[k] = sc.z_min;
      b.hi[k] = sc.z_max;
      ++k;
    }
  }
  for (int u = 0; u < num_users; ++u, ++k) {
    b.lo[k] = 0.0;
    b.hi[k] = cell_budget(sc, mode, association[u]);
  }
  for (int d = 0; d < num_uavs; ++d, ++k) {
    b.lo[k] = 0.0;
    b.hi[k] = sc.donor_budget_watt;
  }
  return b;
}

std::vector<double> PlacementSpace::encode(const Deployment& dep, const Allocation& alloc) const {
  std::vector<double> x(dims(), 0.0);
  int k = 0;
  if (mode == DeployMode::array) {
    x[0] = dep.daa.theta;
    x[1] = dep.daa.phi;
    x[2] = dep.daa.separation;
    x[3] = dep.daa.center.x;
    x[4] = dep.daa.center.y;
    x[5] = dep.daa.center.z;
    k = 6;
  } else {
    for (int d = 0; d < num_uavs; ++d) {
      x[k++] = dep.uav_pos[d].x;
      x[k++] = dep.uav_pos[d].y;
      x[k++] = dep.uav_pos[d].z;
    }
  }
  for (int u = 0; u < num_users; ++u) x[k++] = alloc.user_power[u];
  for (int d = 0; d < num_uavs; ++d) x[k++] = alloc.backhaul_power[d];
  return x;
}

void PlacementSpace::decode(const std::vector<double>& x, const std::vector<int>& association,
                            DaaAxis axis, Deployment* dep, Allocation* alloc) const {
  dep->mode = mode;
  int k = 0;
  if (mode == DeployMode::array) {
    dep->uav_pos.clear();
    dep->daa.axis = axis;
    dep->daa.theta = x[0];
    dep->daa.phi = x[1];
    dep->daa.separation = x[2];
    dep->daa.center = Vec3{x[3], x[4], x[5]};
    k = 6;
  } else {
    dep->uav_pos.resize(num_uavs);
    for (int d = 0; d < num_uavs; ++d) {
      dep->uav_pos[d] = Vec3{x[k], x[k + 1], x[k + 2]};
      k += 3;
    }
  }
  alloc->association = association;
  alloc->user_power.assign(x.begin() + k, x.begin() + k + num_users);
  k += num_users;
  alloc->backhaul_power.assign(x.begin() + k, x.begin() + k + num_uavs);
}

void repair_budgets(const Scenario& sc, DeployMode mode, Allocation& alloc) {
  const int nu = static_cast<int>(alloc.user_power.size());
  const int nd = static_cast<int>(alloc.backhaul_power.size());

  double donor_total = 0.0;
  for (int u = 0; u < nu; ++u) {
    if (alloc.association[u] == kDonorCell) donor_total += alloc.user_power[u];
  }
  for (int d = 0; d < nd; ++d) donor_total += alloc.backhaul_power[d];
  if (donor_total > sc.donor_budget_watt) {
    const double scale = sc.donor_budget_watt / donor_total;
    for (int u = 0; u < nu; ++u) {
      if (alloc.association[u] == kDonorCell) alloc.user_power[u] *= scale;
    }
    for (int d = 0; d < nd; ++d) alloc.backhaul_power[d] *= scale;
  }

  if (mode == DeployMode::array) {
    if (nd == 0) return;
    double total = 0.0;
    for (int u = 0; u < nu; ++u) {
      if (alloc.association[u] != kDonorCell) total += alloc.user_power[u];
    }
    const double budget = cell_budget(sc, mode, 0);
    if (total > budget) {
      const double scale = budget / total;
      for (int u = 0; u < nu; ++u) {
        if (alloc.association[u] != kDonorCell) alloc.user_power[u] *= scale;
      }
    }
    return;
  }
  for (int d = 0; d < nd; ++d) {
    double total = 0.0;
    for (int u = 0; u < nu; ++u) {
      if (alloc.association[u] == d) total += alloc.user_power[u];
    }
    if (total > sc.uav_budget_watt) {
      const double scale = sc.uav_budget_watt / total;
      for (int u = 0; u < nu; ++u) {
        if (alloc.association[u] == d) alloc.user_power[u] *= scale;
      }
    }
  }
}

double default_violation_penalty(const Scenario& sc) {
  return 10.0 * std::log2(1.0 + sc.eps_user);
}

PlacementResult solve_placement(const EvalContext& ctx, const Deployment& incumbent,
                                const Allocation& incumbent_alloc, std::uint64_t seed,
                                EvalWorkspace& ws) {
  const Scenario& sc = ctx.scenario();
  PlacementResult out;

  if (sc.num_uavs == 0) {
    out.dep = incumbent;
    out.alloc = incumbent_alloc;
    out.eval = evaluate_allocation(ctx, out.dep, out.alloc, ws);
    out.theta = out.eval.sum_rate_se;
    out.converged = true;
    if (out.eval.user_violations == 0 && out.eval.backhaul_violations == 0) {
      out.has_feasible = true;
      out.feasible_dep = out.dep;
      out.feasible_alloc = out.alloc;
      out.feasible_eval = out.eval;
    }
    return out;
  }

  PlacementSpace space;
  space.mode = incumbent.mode;
  space.num_uavs = sc.num_uavs;
  space.num_users = sc.num_users;

  const std::vector<int>& assoc = incumbent_alloc.association;
  const Bounds b = space.bounds(sc, assoc);
  const std::vector<double> seed_x = space.encode(incumbent, incumbent_alloc);

  const double e_user =
      sc.swarm.penalty_user >= 0.0 ? sc.swarm.penalty_user : default_violation_penalty(sc);
  const double e_backhaul =
      sc.swarm.penalty_backhaul >= 0.0 ? sc.swarm.penalty_backhaul : default_violation_penalty(sc);

  struct FeasibleBest {
    bool has = false;
    double f = -std::numeric_limits<double>::infinity();
    std::vector<double> x;
  } feas;

  Deployment cand_dep;
  Allocation cand_alloc;
  const DaaAxis axis = sc.daa_axis;
  auto objective = [&](const std::vector<double>& x) -> double {
    space.decode(x, assoc, axis, &cand_dep, &cand_alloc);
    repair_budgets(sc, space.mode, cand_alloc);
    EvalResult ev;
    try {
      ev = evaluate_allocation(ctx, cand_dep, cand_alloc, ws);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
    const double theta =
        ev.sum_rate_se - e_user * ev.user_violations - e_backhaul * ev.backhaul_violations;
    if (ev.user_violations == 0 && ev.backhaul_violations == 0 && theta > feas.f) {
      feas.has = true;
      feas.f = theta;
      feas.x = x;
    }
    return theta;
  };

  const int window =
      space.mode == DeployMode::array ? sc.swarm.window_array : sc.swarm.window;
  const PsoResult r = run_pso(sc.swarm, b, seed_x, seed, objective, window);

  space.decode(r.best_x, assoc, axis, &out.dep, &out.alloc);
  repair_budgets(sc, space.mode, out.alloc);
  out.eval = evaluate_allocation(ctx, out.dep, out.alloc, ws);
  out.theta = r.best_f;
  out.iterations = r.iterations;
  out.converged = r.converged;

  if (feas.has) {
    out.has_feasible = true;
    space.decode(feas.x, assoc, axis, &out.feasible_dep, &out.feasible_alloc);
    repair_budgets(sc, space.mode, out.feasible_alloc);
    out.feasible_eval = evaluate_allocation(ctx, out.feasible_dep, out.feasible_alloc, ws);
  }
  return out;
}

}  // namespace uavsim
