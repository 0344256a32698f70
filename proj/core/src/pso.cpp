#include "uavsim/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uavsim/types.hpp"

namespace uavsim {

namespace {

double wrap_into(double x, double lo, double hi) {
  const double range = hi - lo;
  double y = std::fmod(x - lo, range);
  if (y < 0.0) y += range;
  return lo + y;
}

void apply_bounds(const Bounds& b, std::vector<double>& x, std::vector<double>& v) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (b.wrap[j]) {
      x[j] = wrap_into(x[j], b.lo[j], b.hi[j]);
    } else if (x[j] < b.lo[j]) {
      x[j] = b.lo[j];
      v[j] = 0.0;
    } else if (x[j] > b.hi[j]) {
      x[j] = b.hi[j];
      v[j] = 0.0;
    }
  }
}

void check_sizes(const Bounds& b, const std::vector<double>& seed_point) {
  if (b.lo.size() != b.hi.size() || b.lo.size() != b.wrap.size() ||
      b.lo.size() != seed_point.size()) {
    throw ValidationError("swarm bounds and seed point disagree in dimension");
  }
  for (std::size_t j = 0; j < b.lo.size(); ++j) {
    if (!(b.lo[j] < b.hi[j])) {
      throw ValidationError("swarm bounds must satisfy lo < hi in every coordinate");
    }
  }
}

}  // namespace

void init_swarm(const SwarmParams& params, const Bounds& b, const std::vector<double>& seed_point,
                Rng& rng, const ObjectiveFn& f, SwarmState& s) {
  check_sizes(b, seed_point);
  const int n = params.swarm_size;
  const std::size_t dim = seed_point.size();
  s.x.assign(n, seed_point);
  s.v.assign(n, std::vector<double>(dim, 0.0));
  for (int i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      s.x[i][j] = seed_point[j] * rng.uniform(params.spread_lo, params.spread_hi);
    }
    apply_bounds(b, s.x[i], s.v[i]);
  }
  s.best_x = s.x;
  s.best_f.assign(n, 0.0);
  s.gbest_f = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    s.best_f[i] = f(s.x[i]);
    if (s.best_f[i] > s.gbest_f) {
      s.gbest_f = s.best_f[i];
      s.gbest_x = s.x[i];
    }
  }
  s.gbest_history.assign(1, s.gbest_f);
  s.iteration = 0;
}

void pso_step(const SwarmParams& params, const Bounds& b, Rng& rng, const ObjectiveFn& f,
              SwarmState& s) {
  const std::size_t dim = s.gbest_x.size();
  const int span = std::max(params.max_iters - 1, 1);
  const double t = std::min(s.iteration, span);
  const double w =
      params.inertia_start + (params.inertia_end - params.inertia_start) * t / span;

  for (std::size_t i = 0; i < s.x.size(); ++i) {
    auto& x = s.x[i];
    auto& v = s.v[i];
    for (std::size_t j = 0; j < dim; ++j) {
      const double r1 = rng.uniform();
      const double r2 = rng.uniform();
      v[j] = w * v[j] + params.cognitive * r1 * (s.best_x[i][j] - x[j]) +
             params.social * r2 * (s.gbest_x[j] - x[j]);
      x[j] += v[j];
    }
    apply_bounds(b, x, v);
    const double fx = f(x);
    if (fx > s.best_f[i]) {
      s.best_f[i] = fx;
      s.best_x[i] = x;
    }
    if (fx > s.gbest_f) {
      s.gbest_f = fx;
      s.gbest_x = x;
    }
  }
  ++s.iteration;
  s.gbest_history.push_back(s.gbest_f);
}

bool pso_converged(const SwarmParams& params, const SwarmState& s, int window) {
  const std::size_t n = s.gbest_history.size();
  if (static_cast<int>(n) < window) return false;
  const double now = s.gbest_history[n - 1];
  const double then = s.gbest_history[n - window];
  if (!std::isfinite(now)) return false;
  const double scale = std::abs(now);
  return std::abs(now - then) <= params.eps_rel * scale;
}

PsoResult run_pso(const SwarmParams& params, const Bounds& b,
                  const std::vector<double>& seed_point, std::uint64_t seed,
                  const ObjectiveFn& f, int window) {
  Rng rng(seed);
  SwarmState s;
  init_swarm(params, b, seed_point, rng, f, s);
  PsoResult out;
  for (int i = 0; i < params.max_iters; ++i) {
    pso_step(params, b, rng, f, s);
    if (pso_converged(params, s, window)) {
      out.converged = true;
      break;
    }
  }
  out.best_x = s.gbest_x;
  out.best_f = s.gbest_f;
  out.iterations = s.iteration;
  out.history = s.gbest_history;
  return out;
}

}  // namespace uavsim
