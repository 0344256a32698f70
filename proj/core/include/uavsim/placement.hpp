#pragma once

#include <cstdint>
#include <vector>

#include "uavsim/network.hpp"
#include "uavsim/pso.hpp"

namespace uavsim {

// Decision-variable layout for the deployment search: drone coordinates
// first (distributed: x,y,z per drone; array: axis angles, element
// separation, centroid), then one transmit power per user, then one power
// per backhaul stream. The association is frozen while deployment moves.
struct PlacementSpace {
  DeployMode mode = DeployMode::distributed;
  int num_uavs = 0;
  int num_users = 0;

  int deploy_dims() const { return mode == DeployMode::array ? 6 : 3 * num_uavs; }
  int dims() const { return deploy_dims() + num_users + num_uavs; }

  Bounds bounds(const Scenario& sc, const std::vector<int>& association) const;
  std::vector<double> encode(const Deployment& dep, const Allocation& alloc) const;
  void decode(const std::vector<double>& x, const std::vector<int>& association,
              DaaAxis axis, Deployment* dep, Allocation* alloc) const;
};

// Scales a cell's powers down proportionally when a candidate overruns the
// cell budget; the donor pools direct-link and backhaul power.
void repair_budgets(const Scenario& sc, DeployMode mode, Allocation& alloc);

// Penalty charged per entity under its SINR target: ten times the rate a
// user would earn exactly at the target.
double default_violation_penalty(const Scenario& sc);

struct PlacementResult {
  Deployment dep;
  Allocation alloc;
  EvalResult eval;
  double theta = 0.0;
  int iterations = 0;
  bool converged = false;
  // best candidate seen with zero threshold violations, when one exists
  bool has_feasible = false;
  Deployment feasible_dep;
  Allocation feasible_alloc;
  EvalResult feasible_eval;
};

// Swarm search over deployment and powers, seeded at the incumbent. Score =
// sum rate minus per-violation penalties. Candidates with degenerate
// geometry (coincident transmitters) score -infinity instead of aborting the
// search. With no drones in the scenario this is a no-op that re-evaluates
// the incumbent.
PlacementResult solve_placement(const EvalContext& ctx, const Deployment& incumbent,
                                const Allocation& incumbent_alloc, std::uint64_t seed,
                                EvalWorkspace& ws);

}  // namespace uavsim
