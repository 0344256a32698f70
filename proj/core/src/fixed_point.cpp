#include "uavsim/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int count_on_cell(const std::vector<int>& association, int cell) {
  int n = 0;
  for (int c : association) {
    if (c == cell) ++n;
  }
  return n;
}

// Equal split of each cell's budget across its users; the donor splits its
// budget across direct-link users and backhaul streams together.
void init_equal_split(const Scenario& sc, DeployMode mode, Allocation& alloc) {
  const int nu = sc.num_users;
  const int nd = sc.num_uavs;
  alloc.user_power.assign(nu, 0.0);
  alloc.backhaul_power.assign(nd, 0.0);
  const int donor_users = count_on_cell(alloc.association, kDonorCell);
  const double donor_share = sc.donor_budget_watt / std::max(donor_users + nd, 1);
  for (int d = 0; d < nd; ++d) alloc.backhaul_power[d] = donor_share;
  if (mode == DeployMode::array) {
    const int array_users = nu - donor_users;
    const double share =
        array_users > 0 ? cell_budget(sc, mode, 0) / array_users : 0.0;
    for (int u = 0; u < nu; ++u) {
      alloc.user_power[u] = alloc.association[u] == kDonorCell ? donor_share : share;
    }
    return;
  }
  std::vector<double> cell_share(nd, 0.0);
  for (int d = 0; d < nd; ++d) {
    const int n = count_on_cell(alloc.association, d);
    cell_share[d] = n > 0 ? sc.uav_budget_watt / n : 0.0;
  }
  for (int u = 0; u < nu; ++u) {
    const int c = alloc.association[u];
    alloc.user_power[u] = c == kDonorCell ? donor_share : cell_share[c];
  }
}

}  // namespace

Allocation random_equal_allocation(const Scenario& sc, DeployMode mode, std::uint64_t seed) {
  const std::vector<int> cells = candidate_cells(mode, sc.num_uavs);
  Allocation alloc;
  alloc.association.resize(sc.num_users);
  Rng rng(seed);
  for (int u = 0; u < sc.num_users; ++u) {
    alloc.association[u] = cells[rng.uniform_int(static_cast<int>(cells.size()))];
  }
  init_equal_split(sc, mode, alloc);
  return alloc;
}

std::vector<int> candidate_cells(DeployMode mode, int num_uavs) {
  std::vector<int> cells{kDonorCell};
  if (mode == DeployMode::array) {
    if (num_uavs > 0) cells.push_back(0);
  } else {
    for (int d = 0; d < num_uavs; ++d) cells.push_back(d);
  }
  return cells;
}

std::vector<std::vector<double>> unity_power_matrix(const EvalContext& ctx,
                                                    const EvalWorkspace& ws,
                                                    const Allocation& prev) {
  const Scenario& sc = ctx.scenario();
  const LinkGains& g = ws.gains;
  const int nu = sc.num_users;
  const bool array = g.mode == DeployMode::array;
  const std::vector<int> cells = candidate_cells(g.mode, sc.num_uavs);

  std::vector<std::vector<double>> m(cells.size(), std::vector<double>(nu, kInf));
  for (int u = 0; u < nu; ++u) {
    for (std::size_t s = 0; s < cells.size(); ++s) {
      const int cell = cells[s];
      double gain = 0.0;
      double interference = 0.0;
      if (cell == kDonorCell) {
        gain = g.direct_gain[u];
        interference = array ? array_leak_mean(g, prev, u, u)
                             : access_interference(g, prev, u, kDonorCell, u);
      } else if (array) {
        // members keep their zero-forced stream; a prospective joiner is
        // priced at the gain it would actually get inside the open group
        gain = prev.association[u] == kDonorCell ? g.array_join_gain[u] : g.array_gain[u];
        interference = donor_leak_mean(g, prev, u, u);
      } else {
        gain = g.access(cell, u);
        interference =
            access_interference(g, prev, u, cell, u) + donor_leak_mean(g, prev, u, u);
      }
      if (gain > 0.0) m[s][u] = (sc.noise_watt + interference) / gain;
    }
  }
  return m;
}

FixedPointResult solve_power_association(const EvalContext& ctx, const Deployment& dep,
                                         std::uint64_t init_seed, EvalWorkspace& ws) {
  const Scenario& sc = ctx.scenario();
  const FixedPointParams& fp = sc.fp;
  const int nu = sc.num_users;
  const int nd = sc.num_uavs;
  const std::vector<int> cells = candidate_cells(dep.mode, nd);

  FixedPointResult out;
  Allocation cur = random_equal_allocation(sc, dep.mode, init_seed);
  compute_link_gains(ctx, dep, cur.association, ws);

  // When a user is nearly indifferent between two cells, re-selection can
  // flip it back and forth forever (the move itself changes the gains, so
  // the map is not monotone in the association). Detecting the period-2
  // cycle and freezing the association turns the rest of the run into pure
  // power control, which is a standard interference function and converges.
  bool frozen = false;
  std::vector<int> prev1 = cur.association;
  std::vector<int> prev2;

  for (int iter = 1; iter <= fp.max_iters; ++iter) {
    const auto m = unity_power_matrix(ctx, ws, cur);

    Allocation next = cur;
    int changed = 0;
    for (int u = 0; u < nu; ++u) {
      std::size_t best = 0;
      if (frozen) {
        const int c = cur.association[u];
        best = c == kDonorCell ? 0 : (dep.mode == DeployMode::array ? 1 : c + 1);
      } else {
        for (std::size_t s = 1; s < cells.size(); ++s) {
          if (m[s][u] < m[best][u]) best = s;
        }
      }
      if (std::isinf(m[best][u])) {
        throw InfeasibleError("user " + std::to_string(u) +
                              " cannot reach its SINR target from any cell");
      }
      const int cell = cells[best];
      if (cell != cur.association[u]) ++changed;
      next.association[u] = cell;
      next.user_power[u] = sc.eps_user * m[best][u];
    }
    if (!frozen && !prev2.empty() && next.association == prev2 &&
        next.association != prev1) {
      frozen = true;  // back to the state of two iterations ago
    }
    prev2 = std::move(prev1);
    prev1 = next.association;
    // per-cell equal-share budget caps, applied unconditionally
    for (int u = 0; u < nu; ++u) {
      const int cell = next.association[u];
      const int members = count_on_cell(next.association, cell);
      const double cap = cell_budget(sc, dep.mode, cell) / members;
      next.user_power[u] = std::min(next.user_power[u], cap);
    }

    if (changed > 0) compute_link_gains(ctx, dep, next.association, ws);

    if (nd > 0) {
      const LinkGains& g = ws.gains;
      double tue_total = 0.0;
      for (int u = 0; u < nu; ++u) {
        if (next.association[u] == kDonorCell) tue_total += next.user_power[u];
      }
      for (int d = 0; d < nd; ++d) {
        const double t = (sc.noise_watt + backhaul_interference(g, next, d)) / g.bh_gain[d];
        next.backhaul_power[d] = sc.eps_backhaul * t;
      }
      const double zeta = std::max(0.0, (sc.donor_budget_watt - tue_total) / nd);
      const bool over = std::any_of(next.backhaul_power.begin(), next.backhaul_power.end(),
                                    [zeta](double p) { return p > zeta; });
      if (over) {
        for (double& p : next.backhaul_power) p = std::min(p, zeta);
      } else {
        const int donor_users = count_on_cell(next.association, kDonorCell);
        const double limit =
            donor_users > 0 ? sc.donor_budget_watt / donor_users : sc.donor_budget_watt / nd;
        for (double& p : next.backhaul_power) p = std::min(p, limit);
      }
    }

    double dp = 0.0;
    for (int u = 0; u < nu; ++u) dp = std::max(dp, std::abs(next.user_power[u] - cur.user_power[u]));
    double db = 0.0;
    for (int d = 0; d < nd; ++d) {
      db = std::max(db, std::abs(next.backhaul_power[d] - cur.backhaul_power[d]));
    }
    out.max_power_delta.push_back(dp);
    out.max_backhaul_delta.push_back(db);
    out.assoc_changes.push_back(changed);
    std::vector<double> snapshot = next.user_power;
    snapshot.insert(snapshot.end(), next.backhaul_power.begin(), next.backhaul_power.end());
    out.power_trace.push_back(std::move(snapshot));

    cur = std::move(next);
    out.iterations = iter;
    if (dp <= fp.eps_power && db <= fp.eps_backhaul && changed <= fp.eps_assoc) {
      out.converged = true;
      break;
    }
  }

  out.report = compute_sinr_report(ctx, ws, cur);
  const double floor = sc.eps_user * (1.0 - kSinrSlack);
  for (int u = 0; u < nu; ++u) {
    if (out.report.user[u] < floor) out.report.outage[u] = true;
  }
  out.alloc = std::move(cur);
  return out;
}

}  // namespace uavsim
