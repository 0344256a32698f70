// Microbenchmarks for the solver hot paths: swarm steps as the search space
// grows, one full fitness evaluation, the power-control fixed point, and the
// donor-side beamforming stack.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "uavsim/fixed_point.hpp"
#include "uavsim/orchestrator.hpp"
#include "uavsim/placement.hpp"
#include "uavsim/precoding.hpp"
#include "uavsim/pso.hpp"

namespace {

using namespace uavsim;

Scenario reference_scenario(int num_uavs, int num_users) {
  Scenario sc;
  sc.num_uavs = num_uavs;
  sc.num_users = num_users;
  sc.distribution = UserDistribution::multi_cluster;
  return realize_layout(sc, 7);
}

// Swarm step cost at the variable count the array-mode placement search uses
// (6 pose variables plus one power per user and per element). The objective
// is constant so the measurement isolates the swarm bookkeeping.
void BM_SwarmStep(benchmark::State& state) {
  const int num_uavs = static_cast<int>(state.range(0));
  const int dims = 6 + 25 + num_uavs;

  SwarmParams params;
  Bounds b;
  b.lo.assign(dims, 0.0);
  b.hi.assign(dims, 1.0);
  b.wrap.assign(dims, false);
  const ObjectiveFn f = [](const std::vector<double>&) { return 1.0; };

  Rng rng(1);
  SwarmState s;
  init_swarm(params, b, std::vector<double>(dims, 0.5), rng, f, s);
  for (auto _ : state) {
    pso_step(params, b, rng, f, s);
    benchmark::DoNotOptimize(s.gbest_f);
  }
  state.SetItemsProcessed(state.iterations() * params.swarm_size * dims);
}

void BM_FitnessEvaluation(benchmark::State& state) {
  const Scenario sc = reference_scenario(4, 25);
  EvalContext ctx(sc, 3);
  const Deployment dep = random_deployment(sc, DeployMode::distributed, 5);
  const Allocation alloc = random_equal_allocation(sc, DeployMode::distributed, 9);
  EvalWorkspace ws;
  for (auto _ : state) {
    const EvalResult r = evaluate_allocation(ctx, dep, alloc, ws);
    benchmark::DoNotOptimize(r.sum_rate_se);
  }
}

void BM_PowerControlSolve(benchmark::State& state) {
  const Scenario sc = reference_scenario(4, 25);
  EvalContext ctx(sc, 3);
  const Deployment dep = random_deployment(sc, DeployMode::distributed, 5);
  EvalWorkspace ws;
  for (auto _ : state) {
    const FixedPointResult r = solve_power_association(ctx, dep, 11, ws);
    benchmark::DoNotOptimize(r.iterations);
  }
}

void BM_BeamformingStack(benchmark::State& state) {
  Rng rng(4);
  ComplexMatrix h(5, 64);
  for (std::size_t r = 0; r < h.rows(); ++r) {
    for (std::size_t c = 0; c < h.cols(); ++c) h(r, c) = rng.cgaussian();
  }
  for (auto _ : state) {
    const Precoder p = zf_precoder(h);
    benchmark::DoNotOptimize(p.v.data());
  }
}

}  // namespace

BENCHMARK(BM_SwarmStep)->Arg(4)->Arg(8)->Arg(16);
BENCHMARK(BM_FitnessEvaluation);
BENCHMARK(BM_PowerControlSolve);
BENCHMARK(BM_BeamformingStack);

BENCHMARK_MAIN();
