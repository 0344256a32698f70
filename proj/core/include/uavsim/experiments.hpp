#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uavsim/orchestrator.hpp"

namespace uavsim {

enum class RunMode { baseline, distributed, daa, reversed };
std::string to_string(RunMode mode);
std::optional<RunMode> parse_run_mode(const std::string& name);

// Water-filling levels over parallel scalar channels: p_i = (1/lambda -
// noise/g_i)+ with lambda found by bisection so the powers sum to budget.
// Zero-gain channels get zero power; an all-zero gain vector returns zeros.
std::vector<double> waterfill_powers(const std::vector<double>& gains, double noise,
                                     double budget);

// Donor-only single-antenna reference: users take turns on the full band and
// the donor water-fills its budget across them. Users allocated zero power
// are flagged as outage. Rates use the same share convention as the rest of
// the system (1/U each, or all-ones with uniform_shares).
struct BaselineResult {
  Allocation alloc;
  SinrReport report;
  double sum_rate_se = 0.0;
};
BaselineResult run_baseline(const EvalContext& ctx);

inline constexpr double kOutageSentinelDb = -999.0;

struct TrialResult {
  int trial = 0;
  RunMode mode = RunMode::baseline;
  bool failed = false;
  std::string error;
  double sum_rate_se = 0.0;
  double sum_rate_bps = 0.0;
  double mean_tue_sinr_db = 0.0;  // NaN when the class is empty
  double mean_aue_sinr_db = 0.0;
  double mean_bh_sinr_db = 0.0;
  int outage_count = 0;           // users with zero rate (outage or gated serving cell)
  int outer_iters = 0;
  int pso_iters = 0;
  double runtime_ms = 0.0;
  std::vector<double> user_sinr_db;      // per user; unserved users hold the sentinel
  std::vector<double> backhaul_sinr_db;  // per drone / element
};

struct RunConfig {
  Scenario scenario;
  std::vector<RunMode> modes{RunMode::baseline, RunMode::distributed, RunMode::daa};
  int trials = 1;
  std::uint64_t seed = 1;
  int workers = 1;
};

// One row per (trial, mode), ordered by trial then by the configured mode
// list regardless of worker count. All modes of a trial share the same user
// layout and channel draws. Solver failures land in the row's error field
// instead of aborting the run.
std::vector<TrialResult> run_monte_carlo(const RunConfig& cfg);

// Single trial entry point (used by the CLI for spot runs and by tests).
std::vector<TrialResult> run_trial(const Scenario& sc, std::uint64_t master_seed, int trial,
                                   const std::vector<RunMode>& modes);

struct ModeSummary {
  RunMode mode = RunMode::baseline;
  int trials = 0;
  int failures = 0;
  double mean_se = 0.0;
  double median_se = 0.0;
  double stddev_se = 0.0;
  double mean_tue_db = 0.0;
  double mean_aue_db = 0.0;
  double mean_bh_db = 0.0;
  double mean_outage = 0.0;
  double mean_outer_iters = 0.0;
  double mean_pso_iters = 0.0;
};

struct Aggregate {
  std::vector<ModeSummary> modes;
  // mean sum-rate ratios for every ordered mode pair, keyed "a_over_b"
  std::vector<std::pair<std::string, double>> ratios;
};
Aggregate aggregate(const std::vector<TrialResult>& results);

// trials.csv: one row per (trial, mode); numeric cells printed with %.10g so
// reruns with the same seed produce identical rows (runtime_ms is the only
// machine-dependent column, kept last).
void write_trials_csv(const std::string& path, const std::vector<TrialResult>& results);
// summary.json: configuration echo plus per-mode statistics; carries no
// timing so it is fully reproducible.
void write_summary_json(const std::string& path, const RunConfig& cfg, const Aggregate& agg);
// cdf_user_sinr_<mode>.csv / cdf_backhaul_sinr_<mode>.csv: pooled empirical
// distributions over all non-failed trials, outage entries excluded.
void write_sinr_cdfs(const std::string& dir, const std::vector<TrialResult>& results);

// Writes the full result set into out_dir; returns the number of failed
// rows. Creates the directory when missing.
int export_results(const std::string& out_dir, const RunConfig& cfg,
                   const std::vector<TrialResult>& results);

}  // namespace uavsim
