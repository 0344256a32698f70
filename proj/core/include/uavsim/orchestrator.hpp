#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavsim/fixed_point.hpp"
#include "uavsim/placement.hpp"

namespace uavsim {

enum class StopReason { association, deployment, rate, max_iters, degenerate };
std::string to_string(StopReason r);

struct Solution {
  Deployment dep;
  Allocation alloc;
  SinrReport report;
  double sum_rate_se = 0.0;
  double sum_rate_bps = 0.0;
  bool feasible = false;
  int outer_iters = 0;
  int fp_iters_total = 0;
  int pso_iters_total = 0;
  StopReason stop = StopReason::max_iters;
  std::vector<double> rate_trace;  // sum rate after each outer iteration
};

// Uniformly random starting deployment inside the allowed volume.
Deployment random_deployment(const Scenario& sc, DeployMode mode, std::uint64_t seed);

// Demand-aware starting deployment: drones begin over k-means centroids of
// the user positions (the array begins over the overall centroid), so the
// first association round already hands each drone nearby users. A uniform
// start frequently strands every user on the donor, and the alternation then
// stops with the drones never attracting anyone.
Deployment initial_deployment(const Scenario& sc, DeployMode mode, std::uint64_t seed);

// Alternating network optimization: power-and-association fixed point, then
// deployment search, repeated until the association stops changing, the
// transmitters stop moving, or the rate stalls. Returns the best candidate
// seen that meets every budget and threshold (capped users flagged as
// outage); when no candidate is fully feasible the best-rate one is returned
// with feasible=false.
Solution solve_network(const EvalContext& ctx, DeployMode mode, std::uint64_t seed);

// Same alternation entered from the other side: deployment search first from
// a random association, then the fixed point.
Solution solve_network_reversed(const EvalContext& ctx, DeployMode mode, std::uint64_t seed);

}  // namespace uavsim
