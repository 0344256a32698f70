#include "uavsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "json.hpp"

namespace uavsim {

namespace {

constexpr std::uint64_t kTagTrial = 0xA11CE;
constexpr std::uint64_t kTagLayout = 1;
constexpr std::uint64_t kTagChannels = 2;
constexpr std::uint64_t kTagSolve = 3;

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// linear mean -> dB; NaN for an empty class
double mean_db(const std::vector<double>& linear) {
  if (linear.empty()) return quiet_nan();
  double s = 0.0;
  for (double v : linear) s += v;
  return linear_to_db(s / static_cast<double>(linear.size()));
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return quiet_nan();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return quiet_nan();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::baseline: return "baseline";
    case RunMode::distributed: return "distributed";
    case RunMode::daa: return "daa";
    case RunMode::reversed: return "reversed";
  }
  return "unknown";
}

std::optional<RunMode> parse_run_mode(const std::string& name) {
  if (name == "baseline") return RunMode::baseline;
  if (name == "distributed") return RunMode::distributed;
  if (name == "daa") return RunMode::daa;
  if (name == "reversed") return RunMode::reversed;
  return std::nullopt;
}

std::vector<double> waterfill_powers(const std::vector<double>& gains, double noise,
                                     double budget) {
  const std::size_t n = gains.size();
  std::vector<double> p(n, 0.0);
  if (budget <= 0.0) return p;
  double best = 0.0;
  for (double g : gains) {
    if (std::isfinite(g)) best = std::max(best, g);
  }
  if (best <= 0.0) return p;

  auto total = [&](double lambda) {
    double s = 0.0;
    for (double g : gains) {
      if (g > 0.0 && std::isfinite(g)) s += std::max(0.0, 1.0 / lambda - noise / g);
    }
    return s;
  };

  double hi = best / noise;  // above this level every channel shuts off
  double lo = hi;
  for (int i = 0; i < 4000 && total(lo) < budget; ++i) lo *= 0.5;
  for (int i = 0; i < 500 && (hi - lo) > 1e-15 * hi; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (total(mid) >= budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (gains[i] > 0.0 && std::isfinite(gains[i])) {
      p[i] = std::max(0.0, 1.0 / hi - noise / gains[i]);
    }
  }
  return p;
}

BaselineResult run_baseline(const EvalContext& ctx) {
  const Scenario& sc = ctx.scenario();
  const int nu = sc.num_users;

  std::vector<double> g(nu, 0.0);
  for (int u = 0; u < nu; ++u) {
    const double dist = distance(sc.donor_pos, sc.users[u]);
    const cdouble h = assemble_siso(ctx.trial().donor_user[u], dist, sc.channel);
    g[u] = std::norm(h);
  }
  const double budget =
      sc.waterfill_per_user_average ? sc.donor_budget_watt * nu : sc.donor_budget_watt;
  const std::vector<double> p = waterfill_powers(g, sc.noise_watt, budget);

  BaselineResult out;
  out.alloc.association.assign(nu, kDonorCell);
  out.alloc.user_power = p;
  out.report.association = out.alloc.association;
  out.report.user.resize(nu);
  out.report.outage.assign(nu, false);
  for (int u = 0; u < nu; ++u) {
    out.report.user[u] = p[u] * g[u] / sc.noise_watt;
    if (p[u] <= 0.0) out.report.outage[u] = true;
  }
  const std::vector<double> shares =
      sc.uniform_shares ? uniform_shares(static_cast<std::size_t>(nu))
                        : std::vector<double>(nu, 1.0 / nu);
  out.sum_rate_se = sum_rate(out.report, shares);
  return out;
}

namespace {

bool served_by_gated(const SinrReport& r, int u) {
  const int cell = r.association[u];
  if (cell == kDonorCell) return false;
  if (r.array_mode) {
    return std::any_of(r.gated.begin(), r.gated.end(), [](bool b) { return b; });
  }
  return cell >= 0 && cell < static_cast<int>(r.gated.size()) && r.gated[cell];
}

void fill_metrics(TrialResult& r, const SinrReport& report) {
  const int nu = static_cast<int>(report.user.size());
  std::vector<double> tue, aue, bh;
  r.user_sinr_db.assign(nu, kOutageSentinelDb);
  r.outage_count = 0;
  for (int u = 0; u < nu; ++u) {
    const bool unserved = report.outage[u] || served_by_gated(report, u);
    if (unserved) {
      ++r.outage_count;
      continue;
    }
    r.user_sinr_db[u] = linear_to_db(report.user[u]);
    if (report.association[u] == kDonorCell) {
      tue.push_back(report.user[u]);
    } else {
      aue.push_back(report.user[u]);
    }
  }
  r.backhaul_sinr_db.clear();
  for (std::size_t d = 0; d < report.backhaul.size(); ++d) {
    r.backhaul_sinr_db.push_back(linear_to_db(report.backhaul[d]));
    if (!report.gated[d]) bh.push_back(report.backhaul[d]);
  }
  r.mean_tue_sinr_db = mean_db(tue);
  r.mean_aue_sinr_db = mean_db(aue);
  r.mean_bh_sinr_db = mean_db(bh);
}

TrialResult run_mode_once(const EvalContext& ctx, std::uint64_t trial_seed, RunMode mode,
                          int trial) {
  const Scenario& sc = ctx.scenario();
  TrialResult r;
  r.trial = trial;
  r.mode = mode;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const std::uint64_t solve_seed =
        derive_seed(trial_seed, kTagSolve, static_cast<std::uint64_t>(mode));
    if (mode == RunMode::baseline) {
      const BaselineResult b = run_baseline(ctx);
      r.sum_rate_se = b.sum_rate_se;
      fill_metrics(r, b.report);
    } else {
      Solution s;
      if (mode == RunMode::distributed) {
        s = solve_network(ctx, DeployMode::distributed, solve_seed);
      } else if (mode == RunMode::daa) {
        s = solve_network(ctx, DeployMode::array, solve_seed);
      } else {
        s = solve_network_reversed(ctx, DeployMode::distributed, solve_seed);
      }
      r.sum_rate_se = s.sum_rate_se;
      r.outer_iters = s.outer_iters;
      r.pso_iters = s.pso_iters_total;
      fill_metrics(r, s.report);
    }
    r.sum_rate_bps = r.sum_rate_se * sc.bandwidth_hz;
  } catch (const std::exception& e) {
    r.failed = true;
    r.error = e.what();
    r.sum_rate_se = quiet_nan();
    r.sum_rate_bps = quiet_nan();
    r.mean_tue_sinr_db = quiet_nan();
    r.mean_aue_sinr_db = quiet_nan();
    r.mean_bh_sinr_db = quiet_nan();
  }
  const auto t1 = std::chrono::steady_clock::now();
  r.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return r;
}

}  // namespace

std::vector<TrialResult> run_trial(const Scenario& sc, std::uint64_t master_seed, int trial,
                                   const std::vector<RunMode>& modes) {
  const std::uint64_t trial_seed = derive_seed(master_seed, kTagTrial, trial);
  std::vector<TrialResult> rows;
  rows.reserve(modes.size());
  try {
    const Scenario layout = realize_layout(sc, derive_seed(trial_seed, kTagLayout));
    const EvalContext ctx(layout, derive_seed(trial_seed, kTagChannels));
    for (RunMode m : modes) rows.push_back(run_mode_once(ctx, trial_seed, m, trial));
  } catch (const std::exception& e) {
    rows.clear();
    for (RunMode m : modes) {
      TrialResult r;
      r.trial = trial;
      r.mode = m;
      r.failed = true;
      r.error = e.what();
      r.sum_rate_se = quiet_nan();
      r.sum_rate_bps = quiet_nan();
      r.mean_tue_sinr_db = quiet_nan();
      r.mean_aue_sinr_db = quiet_nan();
      r.mean_bh_sinr_db = quiet_nan();
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::vector<TrialResult> run_monte_carlo(const RunConfig& cfg) {
  validate(cfg.scenario);
  if (cfg.trials < 1) throw ValidationError("trial count must be at least 1");
  if (cfg.modes.empty()) throw ValidationError("no run modes selected");

  std::vector<std::vector<TrialResult>> per_trial(cfg.trials);
  const int workers = std::clamp(cfg.workers, 1, cfg.trials);
  if (workers == 1) {
    for (int t = 0; t < cfg.trials; ++t) {
      per_trial[t] = run_trial(cfg.scenario, cfg.seed, t, cfg.modes);
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int t = next.fetch_add(1); t < cfg.trials; t = next.fetch_add(1)) {
        per_trial[t] = run_trial(cfg.scenario, cfg.seed, t, cfg.modes);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<TrialResult> flat;
  flat.reserve(static_cast<std::size_t>(cfg.trials) * cfg.modes.size());
  for (auto& rows : per_trial) {
    for (auto& r : rows) flat.push_back(std::move(r));
  }
  return flat;
}

Aggregate aggregate(const std::vector<TrialResult>& results) {
  Aggregate agg;
  std::vector<RunMode> order;
  for (const auto& r : results) {
    if (std::find(order.begin(), order.end(), r.mode) == order.end()) order.push_back(r.mode);
  }
  for (RunMode m : order) {
    ModeSummary s;
    s.mode = m;
    std::vector<double> se, tue, aue, bh, outage, outer, pso;
    for (const auto& r : results) {
      if (r.mode != m) continue;
      ++s.trials;
      if (r.failed) {
        ++s.failures;
        continue;
      }
      se.push_back(r.sum_rate_se);
      if (std::isfinite(r.mean_tue_sinr_db)) tue.push_back(r.mean_tue_sinr_db);
      if (std::isfinite(r.mean_aue_sinr_db)) aue.push_back(r.mean_aue_sinr_db);
      if (std::isfinite(r.mean_bh_sinr_db)) bh.push_back(r.mean_bh_sinr_db);
      outage.push_back(r.outage_count);
      outer.push_back(r.outer_iters);
      pso.push_back(r.pso_iters);
    }
    s.mean_se = mean_of(se);
    s.median_se = median_of(se);
    s.stddev_se = stddev_of(se);
    s.mean_tue_db = mean_of(tue);
    s.mean_aue_db = mean_of(aue);
    s.mean_bh_db = mean_of(bh);
    s.mean_outage = mean_of(outage);
    s.mean_outer_iters = mean_of(outer);
    s.mean_pso_iters = mean_of(pso);
    agg.modes.push_back(s);
  }
  for (const auto& a : agg.modes) {
    for (const auto& b : agg.modes) {
      if (a.mode == b.mode) continue;
      if (std::isfinite(b.mean_se) && b.mean_se > 0.0) {
        agg.ratios.emplace_back(to_string(a.mode) + "_over_" + to_string(b.mode),
                                a.mean_se / b.mean_se);
      }
    }
  }
  return agg;
}

void write_trials_csv(const std::string& path, const std::vector<TrialResult>& results) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "trial,mode,sum_rate_bps_hz,sum_rate_bps,mean_tue_sinr_db,mean_aue_sinr_db,"
         "mean_bh_sinr_db,outage_count,outer_iters,pso_iters,runtime_ms\n";
  for (const auto& r : results) {
    out << r.trial << ',' << to_string(r.mode) << ',' << fmt_num(r.sum_rate_se) << ','
        << fmt_num(r.sum_rate_bps) << ',' << fmt_num(r.mean_tue_sinr_db) << ','
        << fmt_num(r.mean_aue_sinr_db) << ',' << fmt_num(r.mean_bh_sinr_db) << ','
        << r.outage_count << ',' << r.outer_iters << ',' << r.pso_iters << ','
        << fmt_num(r.runtime_ms) << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

void write_summary_json(const std::string& path, const RunConfig& cfg, const Aggregate& agg) {
  nlohmann::ordered_json j;
  j["config"]["trials"] = cfg.trials;
  j["config"]["seed"] = cfg.seed;
  j["config"]["workers"] = cfg.workers;
  nlohmann::ordered_json modes = nlohmann::ordered_json::array();
  for (RunMode m : cfg.modes) modes.push_back(to_string(m));
  j["config"]["modes"] = modes;
  const Scenario& sc = cfg.scenario;
  j["config"]["scenario"] = {
      {"num_users", sc.num_users},
      {"num_uavs", sc.num_uavs},
      {"antennas", sc.n_antennas},
      {"region_m", {sc.region_x, sc.region_y}},
      {"donor_budget_dbm", watt_to_dbm(sc.donor_budget_watt)},
      {"uav_budget_dbm", watt_to_dbm(sc.uav_budget_watt)},
      {"noise_dbm", watt_to_dbm(sc.noise_watt)},
      {"user_min_sinr_db", linear_to_db(sc.eps_user)},
      {"backhaul_min_sinr_db", linear_to_db(sc.eps_backhaul)},
      {"bandwidth_hz", sc.bandwidth_hz},
  };
  for (const auto& s : agg.modes) {
    nlohmann::ordered_json m;
    m["trials"] = s.trials;
    m["failures"] = s.failures;
    m["sum_rate_bps_hz"] = {{"mean", s.mean_se}, {"median", s.median_se}, {"stddev", s.stddev_se}};
    m["mean_tue_sinr_db"] = s.mean_tue_db;
    m["mean_aue_sinr_db"] = s.mean_aue_db;
    m["mean_bh_sinr_db"] = s.mean_bh_db;
    m["mean_outage"] = s.mean_outage;
    m["mean_outer_iters"] = s.mean_outer_iters;
    m["mean_pso_iters"] = s.mean_pso_iters;
    j["modes"][to_string(s.mode)] = m;
  }
  for (const auto& [key, value] : agg.ratios) j["ratios"][key] = value;

  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed while writing " + path);
}

namespace {

void write_cdf(const std::string& path, std::vector<double> pool) {
  if (pool.empty()) return;
  std::sort(pool.begin(), pool.end());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "sinr_db,cum_prob\n";
  const double n = static_cast<double>(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out << fmt_num(pool[i]) << ',' << fmt_num(static_cast<double>(i + 1) / n) << '\n';
  }
}

}  // namespace

void write_sinr_cdfs(const std::string& dir, const std::vector<TrialResult>& results) {
  std::vector<RunMode> order;
  for (const auto& r : results) {
    if (std::find(order.begin(), order.end(), r.mode) == order.end()) order.push_back(r.mode);
  }
  for (RunMode m : order) {
    std::vector<double> users, backhaul;
    for (const auto& r : results) {
      if (r.mode != m || r.failed) continue;
      for (double v : r.user_sinr_db) {
        if (v != kOutageSentinelDb) users.push_back(v);
      }
      for (double v : r.backhaul_sinr_db) backhaul.push_back(v);
    }
    const std::string tag = to_string(m);
    write_cdf(dir + "/cdf_user_sinr_" + tag + ".csv", std::move(users));
    write_cdf(dir + "/cdf_backhaul_sinr_" + tag + ".csv", std::move(backhaul));
  }
}

int export_results(const std::string& out_dir, const RunConfig& cfg,
                   const std::vector<TrialResult>& results) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
  write_trials_csv(out_dir + "/trials.csv", results);
  write_summary_json(out_dir + "/summary.json", cfg, aggregate(results));
  write_sinr_cdfs(out_dir, results);
  int failures = 0;
  for (const auto& r : results) {
    if (r.failed) ++failures;
  }
  return failures;
}

}  // namespace uavsim
