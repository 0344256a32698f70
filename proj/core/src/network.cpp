#include "uavsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace uavsim {

std::vector<Vec3> transmitter_positions(const Deployment& dep, int num_uavs) {
  if (dep.mode == DeployMode::array) return element_positions(dep.daa, num_uavs);
  return dep.uav_pos;
}

double cell_budget(const Scenario& sc, DeployMode mode, int cell) {
  if (cell == kDonorCell) return sc.donor_budget_watt;
  if (mode == DeployMode::array) return sc.num_uavs * sc.uav_budget_watt;
  return sc.uav_budget_watt;
}

EvalContext::EvalContext(Scenario sc, std::uint64_t channel_seed)
    : sc_(std::move(sc)), seed_(channel_seed) {
  if (static_cast<int>(sc_.users.size()) != sc_.num_users) {
    throw ValidationError("EvalContext needs a realized user layout (users.size == num_users)");
  }
  trial_ = sample_trial_channels(seed_, sc_.num_uavs, sc_.num_users, sc_.channel);
  donor_user_rows_ = build_donor_user_rows(trial_, sc_.donor_pos, sc_.users, sc_.n_antennas);
  const int nu = sc_.num_users;
  user_gram_ = ComplexMatrix(nu, nu);
  for (int a = 0; a < nu; ++a) {
    user_gram_(a, a) = row_dot_conj(donor_user_rows_, a, donor_user_rows_, a);
    for (int b = 0; b < a; ++b) {
      const cdouble w = row_dot_conj(donor_user_rows_, a, donor_user_rows_, b);
      user_gram_(a, b) = w;
      user_gram_(b, a) = std::conj(w);
    }
  }
}

namespace {

// Assemble the (D+1) x (D+1) gram of [backhaul rows; user row] and invert.
// dd and du carry the precomputed inner products; uu is the user-pair gram.
ComplexMatrix hypothetical_inverse(const ComplexMatrix& dd, const ComplexMatrix& du,
                                   const ComplexMatrix& uu, int user, ComplexMatrix& scratch) {
  const int nd = static_cast<int>(dd.rows());
  const int m = nd + 1;
  scratch = ComplexMatrix(m, m);
  for (int i = 0; i < nd; ++i) {
    for (int j = 0; j < nd; ++j) scratch(i, j) = dd(i, j);
    scratch(i, nd) = du(i, user);
    scratch(nd, i) = std::conj(du(i, user));
  }
  scratch(nd, nd) = uu(user, user);
  return HermitianSolver(scratch).inverse();
}

}  // namespace

void compute_link_gains(const EvalContext& ctx, const Deployment& dep,
                        const std::vector<int>& association, EvalWorkspace& ws) {
  const Scenario& sc = ctx.scenario();
  const int nu = sc.num_users;
  const int nd = sc.num_uavs;
  if (static_cast<int>(association.size()) != nu) {
    throw ValidationError("association size does not match the user count");
  }
  LinkGains& g = ws.gains;
  g.mode = dep.mode;
  g.num_users = nu;
  g.num_uavs = nd;

  if (dep.mode == DeployMode::distributed) {
    if (static_cast<int>(dep.uav_pos.size()) != nd) {
      throw ValidationError("deployment carries the wrong number of drone positions");
    }
    build_distributed_links(ctx.trial(), sc.donor_pos, sc.users, dep.uav_pos, sc.n_antennas,
                            &ws.channels);
  } else {
    build_daa_links(ctx.trial(), sc.donor_pos, sc.users, element_positions(dep.daa, nd),
                    sc.n_antennas, &ws.channels);
  }

  g.tue.clear();
  for (int u = 0; u < nu; ++u) {
    if (association[u] == kDonorCell) g.tue.push_back(u);
  }
  const int nt = static_cast<int>(g.tue.size());
  g.resources = nt > 0 ? nt : (nd > 0 ? 1 : 0);
  g.streams = nd + (nt > 0 ? 1 : 0);

  const ComplexMatrix& uu = ctx.user_gram();
  const ComplexMatrix& hd = ws.channels.donor_uav;
  const ComplexMatrix& husers = ctx.donor_user_rows();

  // inner products against the donor-side rows
  ws.dd = ComplexMatrix(nd, nd);
  for (int i = 0; i < nd; ++i) {
    ws.dd(i, i) = row_dot_conj(hd, i, hd, i);
    for (int j = 0; j < i; ++j) {
      const cdouble w = row_dot_conj(hd, i, hd, j);
      ws.dd(i, j) = w;
      ws.dd(j, i) = std::conj(w);
    }
  }
  ws.du = ComplexMatrix(std::max(nd, 1), std::max(nu, 1));
  for (int d = 0; d < nd; ++d) {
    for (int u = 0; u < nu; ++u) ws.du(d, u) = row_dot_conj(hd, d, husers, u);
  }

  // one gram inverse per user's hypothetical donor stack
  ws.w_cache.resize(nu);
  g.direct_gain.assign(nu, 0.0);
  for (int u = 0; u < nu; ++u) {
    ws.w_cache[u] = hypothetical_inverse(ws.dd, ws.du, uu, u, ws.g_small);
    g.direct_gain[u] = 1.0 / std::real(ws.w_cache[u](nd, nd));
  }

  // Backhaul-only stack used when no user is donor-scheduled.
  ComplexMatrix w_bh;
  if (nt == 0 && nd > 0) w_bh = HermitianSolver(ws.dd).inverse();
  auto resource_inverse = [&](int r) -> const ComplexMatrix& {
    return nt > 0 ? ws.w_cache[g.tue[r]] : w_bh;
  };

  g.bh_gain.assign(nd, 0.0);
  for (int r = 0; r < g.resources; ++r) {
    const ComplexMatrix& w = resource_inverse(r);
    for (int d = 0; d < nd; ++d) g.bh_gain[d] += 1.0 / std::real(w(d, d));
  }
  if (g.resources > 0) {
    for (double& v : g.bh_gain) v /= g.resources;
  }

  g.donor_leak.assign(static_cast<std::size_t>(nu) * g.resources * g.streams, 0.0);
  const int m = g.streams;
  ws.c_vec.resize(m);
  ws.w_row.resize(m);
  for (int u = 0; u < nu; ++u) {
    for (int d = 0; d < nd; ++d) ws.c_vec[d] = ws.du(d, u);
    for (int r = 0; r < g.resources; ++r) {
      if (nt > 0) ws.c_vec[nd] = uu(g.tue[r], u);
      const ComplexMatrix& w = resource_inverse(r);
      for (int k = 0; k < m; ++k) {
        cdouble acc = 0.0;
        for (int j = 0; j < m; ++j) acc += w(k, j) * ws.c_vec[j];
        ws.w_row[k] = acc;
      }
      double* row = &g.donor_leak[(static_cast<std::size_t>(u) * g.resources + r) * m];
      for (int k = 0; k < m; ++k) row[k] = std::norm(ws.w_row[k]) / std::real(w(k, k));
    }
  }

  if (dep.mode == DeployMode::distributed) {
    g.access_gain.assign(static_cast<std::size_t>(nd) * nu, 0.0);
    g.cross_gain.assign(static_cast<std::size_t>(nd) * nd, 0.0);
    for (int d = 0; d < nd; ++d) {
      for (int u = 0; u < nu; ++u) {
        g.access_gain[static_cast<std::size_t>(d) * nu + u] = std::norm(ws.channels.uav_user[d][u]);
      }
      for (int j = 0; j < nd; ++j) {
        if (j == d) continue;
        g.cross_gain[static_cast<std::size_t>(d) * nd + j] = std::norm(ws.channels.uav_uav[d][j]);
      }
    }
    g.groups.clear();
    g.array_gain.clear();
    g.array_solo_gain.clear();
    g.array_leak.clear();
    g.max_group = 0;
    return;
  }

  // array deployment: zero-forcing toward each SDMA group of array users
  g.access_gain.clear();
  g.cross_gain.clear();
  std::vector<int> aue;
  aue.reserve(nu - nt);
  for (int u = 0; u < nu; ++u) {
    if (association[u] != kDonorCell) aue.push_back(u);
  }
  const auto chunks = form_sdma_groups(static_cast<int>(aue.size()), nd);
  g.groups.clear();
  g.groups.reserve(chunks.size());
  g.max_group = 0;
  for (const auto& chunk : chunks) {
    std::vector<int> ids;
    ids.reserve(chunk.size());
    for (int idx : chunk) ids.push_back(aue[idx]);
    g.max_group = std::max(g.max_group, static_cast<int>(ids.size()));
    g.groups.push_back(std::move(ids));
  }

  const ComplexMatrix& ha = ws.channels.daa_user;
  g.array_solo_gain.assign(nu, 0.0);
  for (int u = 0; u < nu; ++u) g.array_solo_gain[u] = std::real(row_dot_conj(ha, u, ha, u));

  g.array_gain.assign(nu, 0.0);
  g.array_leak.assign(static_cast<std::size_t>(nu) * g.groups.size() * std::max(g.max_group, 1),
                      0.0);
  for (std::size_t gi = 0; gi < g.groups.size(); ++gi) {
    const auto& ids = g.groups[gi];
    const int n = static_cast<int>(ids.size());
    ws.g_small = ComplexMatrix(n, n);
    for (int a = 0; a < n; ++a) {
      ws.g_small(a, a) = row_dot_conj(ha, ids[a], ha, ids[a]);
      for (int b = 0; b < a; ++b) {
        const cdouble w = row_dot_conj(ha, ids[a], ha, ids[b]);
        ws.g_small(a, b) = w;
        ws.g_small(b, a) = std::conj(w);
      }
    }
    const ComplexMatrix w = HermitianSolver(ws.g_small).inverse();
    for (int a = 0; a < n; ++a) {
      g.array_gain[ids[a]] = 1.0 / std::real(w(a, a));
    }
    ws.c_vec.resize(n);
    ws.w_row.resize(n);
    for (int u = 0; u < nu; ++u) {
      for (int a = 0; a < n; ++a) ws.c_vec[a] = row_dot_conj(ha, ids[a], ha, u);
      for (int k = 0; k < n; ++k) {
        cdouble acc = 0.0;
        for (int j = 0; j < n; ++j) acc += w(k, j) * ws.c_vec[j];
        ws.w_row[k] = acc;
      }
      double* row =
          &g.array_leak[(static_cast<std::size_t>(u) * g.groups.size() + gi) * g.max_group];
      for (int k = 0; k < n; ++k) row[k] = std::norm(ws.w_row[k]) / std::real(w(k, k));
    }
  }

  // What a donor user would earn if it joined the array: zero-forced against
  // the members of the open group (exact one-step pricing; the serve-alone
  // row norm overstates it badly and makes near-indifferent users cycle).
  g.array_join_gain = g.array_gain;
  const std::vector<int>* open = nullptr;
  if (!g.groups.empty() && static_cast<int>(g.groups.back().size()) < nd) {
    open = &g.groups.back();
  }
  for (int u = 0; u < nu; ++u) {
    if (association[u] != kDonorCell) continue;
    if (open == nullptr) {
      g.array_join_gain[u] = g.array_solo_gain[u];  // it would start a new group
      continue;
    }
    const int n = static_cast<int>(open->size());
    ws.g_small = ComplexMatrix(n + 1, n + 1);
    for (int a = 0; a < n; ++a) {
      ws.g_small(a, a) = row_dot_conj(ha, (*open)[a], ha, (*open)[a]);
      for (int b = 0; b < a; ++b) {
        const cdouble w = row_dot_conj(ha, (*open)[a], ha, (*open)[b]);
        ws.g_small(a, b) = w;
        ws.g_small(b, a) = std::conj(w);
      }
    }
    ws.g_small(n, n) = row_dot_conj(ha, u, ha, u);
    for (int a = 0; a < n; ++a) {
      const cdouble w = row_dot_conj(ha, u, ha, (*open)[a]);
      ws.g_small(n, a) = w;
      ws.g_small(a, n) = std::conj(w);
    }
    try {
      const ComplexMatrix w = HermitianSolver(ws.g_small).inverse();
      g.array_join_gain[u] = 1.0 / std::real(w(n, n));
    } catch (const RankDeficientError&) {
      g.array_join_gain[u] = 0.0;  // spatially inseparable from a member
    }
  }
}

double donor_leak_mean(const LinkGains& g, const Allocation& alloc, int user, int exclude_user) {
  if (g.resources == 0) return 0.0;
  double total = 0.0;
  for (int r = 0; r < g.resources; ++r) {
    for (int d = 0; d < g.num_uavs; ++d) {
      total += alloc.backhaul_power[d] * g.leak(user, r, d);
    }
    if (g.streams > g.num_uavs) {
      const int t = g.tue[r];
      if (t != exclude_user) total += alloc.user_power[t] * g.leak(user, r, g.num_uavs);
    }
  }
  return total / g.resources;
}

double array_leak_mean(const LinkGains& g, const Allocation& alloc, int user, int exclude_user) {
  if (g.groups.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t gi = 0; gi < g.groups.size(); ++gi) {
    const auto& ids = g.groups[gi];
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == exclude_user) continue;
      total += alloc.user_power[ids[i]] * g.aleak(user, static_cast<int>(gi), static_cast<int>(i));
    }
  }
  return total / static_cast<double>(g.groups.size());
}

double access_interference(const LinkGains& g, const Allocation& alloc, int user, int serving_cell,
                           int exclude_user) {
  double total = 0.0;
  for (int d = 0; d < g.num_uavs; ++d) {
    if (d == serving_cell) continue;
    double cell_power = 0.0;
    for (int v = 0; v < g.num_users; ++v) {
      if (v == exclude_user) continue;
      if (alloc.association[v] == d) cell_power += alloc.user_power[v];
    }
    if (cell_power > 0.0) total += g.access(d, user) * cell_power;
  }
  return total;
}

double backhaul_interference(const LinkGains& g, const Allocation& alloc, int drone) {
  if (g.mode == DeployMode::array) return 0.0;
  double total = 0.0;
  for (int j = 0; j < g.num_uavs; ++j) {
    if (j == drone) continue;
    double cell_power = 0.0;
    for (int v = 0; v < g.num_users; ++v) {
      if (alloc.association[v] == j) cell_power += alloc.user_power[v];
    }
    if (cell_power > 0.0) total += g.cross(j, drone) * cell_power;
  }
  return total;
}

SinrReport compute_sinr_report(const EvalContext& ctx, const EvalWorkspace& ws,
                               const Allocation& alloc) {
  const Scenario& sc = ctx.scenario();
  const LinkGains& g = ws.gains;
  const double noise = sc.noise_watt;
  const int nu = g.num_users;
  const int nd = g.num_uavs;

  SinrReport report;
  report.array_mode = g.mode == DeployMode::array;
  report.association = alloc.association;
  report.user.assign(nu, 0.0);
  report.backhaul.assign(nd, 0.0);
  report.gated.assign(nd, false);
  report.outage.assign(nu, false);

  for (int d = 0; d < nd; ++d) {
    const double den = noise + backhaul_interference(g, alloc, d);
    report.backhaul[d] = alloc.backhaul_power[d] * g.bh_gain[d] / den;
  }

  for (int u = 0; u < nu; ++u) {
    const int cell = alloc.association[u];
    double num = 0.0;
    double den = noise;
    if (cell == kDonorCell) {
      num = alloc.user_power[u] * g.direct_gain[u];
      den += g.mode == DeployMode::array ? array_leak_mean(g, alloc, u, -1)
                                         : access_interference(g, alloc, u, kDonorCell, -1);
    } else if (g.mode == DeployMode::array) {
      num = alloc.user_power[u] * g.array_gain[u];
      den += donor_leak_mean(g, alloc, u, -1);
    } else {
      num = alloc.user_power[u] * g.access(cell, u);
      den += access_interference(g, alloc, u, cell, -1) + donor_leak_mean(g, alloc, u, -1);
    }
    report.user[u] = num / den;
  }

  apply_backhaul_gating(report, sc.eps_backhaul);
  return report;
}

double report_sum_rate_se(const Scenario& sc, const LinkGains& g, const SinrReport& report) {
  const std::vector<double> shares =
      sc.uniform_shares
          ? uniform_shares(report.user.size())
          : resource_shares(report.association, sc.num_uavs, report.array_mode,
                            static_cast<int>(g.groups.size()));
  return sum_rate(report, shares);
}

EvalResult evaluate_allocation(const EvalContext& ctx, const Deployment& dep,
                               const Allocation& alloc, EvalWorkspace& ws) {
  const Scenario& sc = ctx.scenario();
  compute_link_gains(ctx, dep, alloc.association, ws);

  EvalResult out;
  out.report = compute_sinr_report(ctx, ws, alloc);
  out.sum_rate_se = report_sum_rate_se(sc, ws.gains, out.report);
  out.sum_rate_bps = out.sum_rate_se * sc.bandwidth_hz;

  const double user_floor = sc.eps_user * (1.0 - kSinrSlack);
  const double bh_floor = sc.eps_backhaul * (1.0 - kSinrSlack);
  for (double s : out.report.user) {
    if (s < user_floor) ++out.user_violations;
  }
  for (double s : out.report.backhaul) {
    if (s < bh_floor) ++out.backhaul_violations;
  }
  return out;
}

namespace {

void add_violation(AuditResult& audit, const std::string& what) {
  audit.ok = false;
  if (!audit.detail.empty()) audit.detail += "; ";
  audit.detail += what;
}

}  // namespace

AuditResult audit_allocation(const EvalContext& ctx, const Deployment& dep,
                             const Allocation& alloc, const SinrReport& report) {
  const Scenario& sc = ctx.scenario();
  const int nu = sc.num_users;
  const int nd = sc.num_uavs;
  AuditResult audit;

  if (static_cast<int>(alloc.association.size()) != nu ||
      static_cast<int>(alloc.user_power.size()) != nu ||
      static_cast<int>(alloc.backhaul_power.size()) != nd) {
    add_violation(audit, "allocation vector sizes disagree with the scenario");
    return audit;
  }
  for (int u = 0; u < nu; ++u) {
    const double p = alloc.user_power[u];
    if (!(p >= 0.0) || !std::isfinite(p)) {
      add_violation(audit, "user " + std::to_string(u) + " has an invalid power");
    }
    const int cell = alloc.association[u];
    const bool cell_ok = cell == kDonorCell || (cell >= 0 && cell < (dep.mode == DeployMode::array
                                                                         ? 1
                                                                         : nd));
    if (!cell_ok) add_violation(audit, "user " + std::to_string(u) + " has an invalid cell");
  }
  for (int d = 0; d < nd; ++d) {
    const double p = alloc.backhaul_power[d];
    if (!(p >= 0.0) || !std::isfinite(p)) {
      add_violation(audit, "backhaul stream " + std::to_string(d) + " has an invalid power");
    }
  }
  if (!audit.ok) return audit;

  // budgets
  double donor_total = 0.0;
  for (int u = 0; u < nu; ++u) {
    if (alloc.association[u] == kDonorCell) donor_total += alloc.user_power[u];
  }
  for (int d = 0; d < nd; ++d) donor_total += alloc.backhaul_power[d];
  if (donor_total > sc.donor_budget_watt * (1.0 + kBudgetSlack)) {
    add_violation(audit, "donor budget exceeded: " + std::to_string(donor_total) + " W");
  }
  if (dep.mode == DeployMode::array) {
    double access_total = 0.0;
    for (int u = 0; u < nu; ++u) {
      if (alloc.association[u] != kDonorCell) access_total += alloc.user_power[u];
    }
    const double budget = cell_budget(sc, dep.mode, 0);
    if (nd > 0 && access_total > budget * (1.0 + kBudgetSlack)) {
      add_violation(audit, "array access budget exceeded: " + std::to_string(access_total) + " W");
    }
  } else {
    for (int d = 0; d < nd; ++d) {
      double cell_total = 0.0;
      for (int u = 0; u < nu; ++u) {
        if (alloc.association[u] == d) cell_total += alloc.user_power[u];
      }
      if (cell_total > sc.uav_budget_watt * (1.0 + kBudgetSlack)) {
        add_violation(audit, "drone " + std::to_string(d) + " access budget exceeded");
      }
    }
  }

  // thresholds and gating consistency
  const double user_floor = sc.eps_user * (1.0 - kSinrSlack);
  const double bh_floor = sc.eps_backhaul * (1.0 - kSinrSlack);
  for (int d = 0; d < nd; ++d) {
    const bool below = report.backhaul[d] < bh_floor;
    if (below != static_cast<bool>(report.gated[d])) {
      add_violation(audit, "gating flag disagrees with backhaul level on drone " +
                               std::to_string(d));
    }
  }
  for (int u = 0; u < nu; ++u) {
    if (report.outage[u]) continue;
    const int cell = alloc.association[u];
    if (cell != kDonorCell) {
      const bool served_gated =
          report.array_mode
              ? std::any_of(report.gated.begin(), report.gated.end(), [](bool b) { return b; })
              : (cell >= 0 && cell < nd && report.gated[cell]);
      if (served_gated) continue;  // rate already zeroed; no threshold promise
    }
    if (report.user[u] < user_floor) {
      add_violation(audit, "user " + std::to_string(u) + " sits below the service threshold");
    }
  }
  return audit;
}

}  // namespace uavsim
