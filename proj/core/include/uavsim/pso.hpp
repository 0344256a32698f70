#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "uavsim/rng.hpp"
#include "uavsim/solver_params.hpp"

namespace uavsim {

// Box constraints per coordinate. Wrapped coordinates are periodic (angles):
// positions fold back into [lo, hi) and keep their velocity; clamped
// coordinates stick to the wall and drop the offending velocity component.
struct Bounds {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<bool> wrap;
};

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

struct SwarmState {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> v;
  std::vector<std::vector<double>> best_x;
  std::vector<double> best_f;
  std::vector<double> gbest_x;
  double gbest_f = 0.0;
  std::vector<double> gbest_history;  // best objective after init and after each step
  int iteration = 0;
};

// Particles start in a multiplicative band around the seed point (particle 0
// keeps the seed exactly, so the incumbent is never lost); velocities start
// at zero. Inertia falls linearly from start to end across max_iters.
void init_swarm(const SwarmParams& params, const Bounds& b, const std::vector<double>& seed_point,
                Rng& rng, const ObjectiveFn& f, SwarmState& s);

void pso_step(const SwarmParams& params, const Bounds& b, Rng& rng, const ObjectiveFn& f,
              SwarmState& s);

// Relative change of the best objective across a trailing window.
bool pso_converged(const SwarmParams& params, const SwarmState& s, int window);

struct PsoResult {
  std::vector<double> best_x;
  double best_f = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

PsoResult run_pso(const SwarmParams& params, const Bounds& b,
                  const std::vector<double>& seed_point, std::uint64_t seed,
                  const ObjectiveFn& f, int window);

}  // namespace uavsim
