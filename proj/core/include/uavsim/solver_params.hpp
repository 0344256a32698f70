#pragma once

namespace uavsim {

// Power-control fixed point (inner allocation step).
struct FixedPointParams {
  int max_iters = 200;
  double eps_power = 1e-6;          // l-inf change in user powers, watts
  double eps_backhaul = 1e-6;       // l-inf change in backhaul powers, watts
  int eps_assoc = 0;                // allowed number of association changes
};

// Swarm placement step.
struct SwarmParams {
  int swarm_size = 200;
  int max_iters = 150;
  double inertia_start = 1.1;
  double inertia_end = 0.1;
  double cognitive = 1.49;
  double social = 1.9;
  double spread_lo = 0.8;           // initial positions drawn in [lo, hi] x seed
  double spread_hi = 1.2;
  int window = 20;                  // convergence window, distributed deployment
  int window_array = 5;             // convergence window, array deployment
  double eps_rel = 1e-3;            // relative best-fitness change over the window
  // Penalty weights for SINR violations; non-positive means the default of
  // ten times the per-user rate at the SINR threshold.
  double penalty_user = -1.0;
  double penalty_backhaul = -1.0;
};

// Outer alternation between allocation and placement.
struct OuterParams {
  int max_iters = 20;
  int eps_assoc = 0;                // association changes counted per user
  double eps_deploy = 1.0;          // l-inf deployment change, meters
  double eps_rate = 1e-3;           // absolute sum-rate change, bit/s/Hz
};

}  // namespace uavsim
