#pragma once

#include <cstdint>
#include <vector>

#include "uavsim/network.hpp"

namespace uavsim {

// Joint power control and user association for a fixed deployment, solved as
// a Jacobi fixed point: every user is offered, by each candidate cell, the
// minimum power that would hit its SINR target against everyone else's
// previous-iteration powers; users pick the cheapest cell, powers scale to
// the target, and per-cell budget caps clamp the result. Backhaul powers
// follow from the updated access powers. The update is a standard
// interference function (monotone and scalable), so the iteration converges
// geometrically from any starting point.

struct FixedPointResult {
  Allocation alloc;
  SinrReport report;   // final state; outage marks users pinned below target by a budget cap
  int iterations = 0;
  bool converged = false;
  // per-iteration convergence evidence
  std::vector<double> max_power_delta;
  std::vector<double> max_backhaul_delta;
  std::vector<int> assoc_changes;
  std::vector<std::vector<double>> power_trace;  // user powers then backhaul powers
};

// Target-normalized minimum power per (cell, user): entry (s, u) is the power
// that gives user u unit SINR from cell s, holding everyone else at `prev`.
// Row 0 is the donor's direct link; the remaining rows are drones (one row
// for the whole array in array mode). Unservable pairs hold +infinity.
std::vector<std::vector<double>> unity_power_matrix(const EvalContext& ctx,
                                                    const EvalWorkspace& ws,
                                                    const Allocation& prev);

// Serving-cell ids corresponding to the rows of unity_power_matrix.
std::vector<int> candidate_cells(DeployMode mode, int num_uavs);

// Starting point shared by the solver and the reversed outer loop: users
// land on uniformly random cells; each cell splits its budget evenly, the
// donor across direct-link users and backhaul streams together.
Allocation random_equal_allocation(const Scenario& sc, DeployMode mode, std::uint64_t seed);

// Runs the fixed point from a seeded random association with equal power
// split. Throws InfeasibleError when some user cannot be served by any cell.
FixedPointResult solve_power_association(const EvalContext& ctx, const Deployment& dep,
                                         std::uint64_t init_seed, EvalWorkspace& ws);

}  // namespace uavsim
