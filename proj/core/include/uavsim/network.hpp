#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavsim/channel.hpp"
#include "uavsim/daa.hpp"
#include "uavsim/link_metrics.hpp"
#include "uavsim/scenario.hpp"

namespace uavsim {

enum class DeployMode { distributed, array };

struct Deployment {
  DeployMode mode = DeployMode::distributed;
  std::vector<Vec3> uav_pos;  // distributed: one entry per drone
  DaaConfig daa;              // array mode
};

// Element (or drone) positions of a deployment.
std::vector<Vec3> transmitter_positions(const Deployment& dep, int num_uavs);

struct Allocation {
  std::vector<int> association;        // per user: kDonorCell or serving cell index
  std::vector<double> user_power;      // watts
  std::vector<double> backhaul_power;  // watts, per drone / array element
};

// Immutable per-trial material: every link's random content plus the
// donor-to-user assemblies and their pairwise inner products, which do not
// depend on where the drones fly.
class EvalContext {
 public:
  EvalContext(Scenario sc, std::uint64_t channel_seed);

  const Scenario& scenario() const { return sc_; }
  const TrialChannels& trial() const { return trial_; }
  const ComplexMatrix& donor_user_rows() const { return donor_user_rows_; }
  const ComplexMatrix& user_gram() const { return user_gram_; }
  std::uint64_t channel_seed() const { return seed_; }

 private:
  Scenario sc_;
  std::uint64_t seed_;
  TrialChannels trial_;
  ComplexMatrix donor_user_rows_;  // U x N
  ComplexMatrix user_gram_;        // U x U, row u dot conj(row v)
};

// Every effective power gain needed to evaluate the network for one
// deployment and association. The donor side runs one zero-forcing stack per
// scheduled direct-link user (plus a hypothetical stack per remaining user);
// gains are recovered from the Gram inverse instead of explicit N-length
// precoder columns: for raw columns of the pseudo-inverse, |h_k v_k|^2 =
// 1 / (G^{-1})_kk and |h_u v_k|^2 = |(c_u G^{-1})_k|^2 / (G^{-1})_kk.
struct LinkGains {
  DeployMode mode = DeployMode::distributed;
  int num_users = 0;
  int num_uavs = 0;

  std::vector<int> tue;        // donor-scheduled users, ascending
  int resources = 0;           // donor stacks evaluated (>=1 whenever the donor transmits)
  int streams = 0;             // columns per donor stack: num_uavs backhaul + 1 direct when scheduled

  std::vector<double> direct_gain;  // per user: on-stream donor gain on its own (or hypothetical) stack
  std::vector<double> bh_gain;      // per drone: mean on-stream backhaul gain over resources
  std::vector<double> donor_leak;   // [user][resource][stream], |h_u v_k(r)|^2

  // distributed deployment
  std::vector<double> access_gain;  // [drone][user], |h|^2
  std::vector<double> cross_gain;   // [tx drone][rx drone], |h|^2

  // array deployment
  std::vector<std::vector<int>> groups;  // SDMA groups of user ids
  std::vector<double> array_gain;        // per user: on-stream gain inside its group (0 if ungrouped)
  std::vector<double> array_solo_gain;   // per user: composite row norm^2 (gain if served alone)
  std::vector<double> array_join_gain;   // per non-member: zero-forced gain if it joined the
                                         // open group (members carry their array_gain here)
  std::vector<double> array_leak;        // [user][group][slot], |h_u v_i(group)|^2
  int max_group = 0;

  double leak(int u, int r, int k) const {
    return donor_leak[(static_cast<std::size_t>(u) * resources + r) * streams + k];
  }
  double access(int d, int u) const { return access_gain[static_cast<std::size_t>(d) * num_users + u]; }
  double cross(int tx, int rx) const { return cross_gain[static_cast<std::size_t>(tx) * num_uavs + rx]; }
  double aleak(int u, int g, int i) const {
    return array_leak[(static_cast<std::size_t>(u) * groups.size() + g) * max_group + i];
  }
};

// Reusable workspace so the optimizer's inner loop stays allocation-free
// after warmup.
struct EvalWorkspace {
  ChannelSet channels;
  LinkGains gains;
  // scratch
  ComplexMatrix du;      // drone x user inner products
  ComplexMatrix dd;      // drone x drone gram block
  ComplexMatrix g_small; // stacked gram
  std::vector<ComplexMatrix> w_cache;  // per-user hypothetical gram inverses
  std::vector<cdouble> c_vec, w_row;
};

void compute_link_gains(const EvalContext& ctx, const Deployment& dep,
                        const std::vector<int>& association, EvalWorkspace& ws);

// Interference sums shared by the SINR report and the power-control matrix.
// Powers are taken from alloc; "exclude_user" removes that user's own stream
// from every sum (hypothetical-move bookkeeping; pass -1 to keep all).
double donor_leak_mean(const LinkGains& g, const Allocation& alloc, int user, int exclude_user);
double array_leak_mean(const LinkGains& g, const Allocation& alloc, int user, int exclude_user);
double access_interference(const LinkGains& g, const Allocation& alloc, int user, int serving_cell,
                           int exclude_user);
double backhaul_interference(const LinkGains& g, const Allocation& alloc, int drone);

SinrReport compute_sinr_report(const EvalContext& ctx, const EvalWorkspace& ws,
                               const Allocation& alloc);

struct EvalResult {
  SinrReport report;
  double sum_rate_se = 0.0;   // bit/s/Hz
  double sum_rate_bps = 0.0;
  int user_violations = 0;    // users below the user threshold
  int backhaul_violations = 0;
};

// Full evaluation: gains, report, gating, rate. Uses ws as scratch.
EvalResult evaluate_allocation(const EvalContext& ctx, const Deployment& dep,
                               const Allocation& alloc, EvalWorkspace& ws);

// Share-weighted sum rate of an existing report; g must hold the link gains
// the report was computed from (it carries the SDMA group count).
double report_sum_rate_se(const Scenario& sc, const LinkGains& g, const SinrReport& report);

// Re-checks a finished solution: per-cell budget totals and thresholds for
// every entity not flagged as gated or outage.
struct AuditResult {
  bool ok = true;
  std::string detail;
};
AuditResult audit_allocation(const EvalContext& ctx, const Deployment& dep,
                             const Allocation& alloc, const SinrReport& report);

inline constexpr double kBudgetSlack = 1e-9;

// Access power budget of a cell: one drone's budget, or all element budgets
// pooled when the cell is the array.
double cell_budget(const Scenario& sc, DeployMode mode, int cell);

}  // namespace uavsim
