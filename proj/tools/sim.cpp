// Command-line front end: Monte Carlo runs, mode comparisons and parameter
// sweeps over the downlink simulator. Exit codes: 0 success, 2 configuration
// error, 3 when some trials failed but results were still written.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uavsim/experiments.hpp"

namespace {

using uavsim::RunConfig;
using uavsim::RunMode;

struct CommonArgs {
  std::string scenario_path;
  std::vector<std::string> modes;
  int trials = 1;
  std::uint64_t seed = 1;
  std::string out_dir = "results";
  int workers = 0;  // 0: one per hardware thread
};

void add_common(CLI::App* cmd, CommonArgs& args, const char* default_modes) {
  cmd->add_option("--scenario", args.scenario_path,
                  "Scenario config file (JSON); defaults apply when omitted");
  cmd->add_option("--trials", args.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "Master seed");
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--workers", args.workers, "Concurrent trials (0: hardware threads)")
      ->check(CLI::NonNegativeNumber);
  args.modes.assign({default_modes});
}

std::string read_scenario_text(const std::string& path) {
  if (path.empty()) return "{}";
  std::ifstream in(path);
  if (!in) throw uavsim::IoError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<RunMode> resolve_modes(const std::vector<std::string>& names) {
  std::vector<RunMode> modes;
  for (const std::string& chunk : names) {
    std::istringstream ss(chunk);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name.empty()) continue;
      const auto mode = uavsim::parse_run_mode(name);
      if (!mode) throw uavsim::ValidationError("unknown mode '" + name + "'");
      modes.push_back(*mode);
    }
  }
  if (modes.empty()) throw uavsim::ValidationError("no run modes given");
  return modes;
}

RunConfig make_config(const CommonArgs& args, const std::string& scenario_text) {
  RunConfig cfg;
  cfg.scenario = uavsim::parse_scenario(scenario_text);
  uavsim::validate(cfg.scenario);
  cfg.modes = resolve_modes(args.modes);
  cfg.trials = args.trials;
  cfg.seed = args.seed;
  cfg.workers = args.workers > 0
                    ? args.workers
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return cfg;
}

void print_summary(const uavsim::Aggregate& agg) {
  std::printf("%-12s %8s %8s %10s %10s %10s %8s %8s\n", "mode", "trials", "failed",
              "mean", "median", "stddev", "outage", "outer");
  for (const uavsim::ModeSummary& m : agg.modes) {
    std::printf("%-12s %8d %8d %10.4f %10.4f %10.4f %8.2f %8.2f\n",
                uavsim::to_string(m.mode).c_str(), m.trials, m.failures, m.mean_se, m.median_se,
                m.stddev_se, m.mean_outage, m.mean_outer_iters);
  }
}

int run_and_export(const RunConfig& cfg, const std::string& out_dir, bool print_ratios) {
  const auto results = uavsim::run_monte_carlo(cfg);
  const int failed = uavsim::export_results(out_dir, cfg, results);
  const uavsim::Aggregate agg = uavsim::aggregate(results);
  print_summary(agg);
  if (print_ratios) {
    for (const auto& [key, value] : agg.ratios) {
      std::printf("ratio %-32s %10.4f\n", key.c_str(), value);
    }
  }
  std::printf("results written to %s\n", out_dir.c_str());
  if (failed > 0) {
    std::fprintf(stderr, "warning: %d trial rows failed; see the error column\n", failed);
    return 3;
  }
  return 0;
}

// "solver.swarm.size" -> "/solver/swarm/size"
std::string dotted_to_pointer(const std::string& dotted) {
  std::string ptr;
  for (char c : dotted) ptr += (c == '.') ? '/' : c;
  return "/" + ptr;
}

nlohmann::json parse_value_literal(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    return nlohmann::json(text);  // bare words are strings (e.g. axis names)
  }
}

int run_sweep(const CommonArgs& args, const std::string& param,
              const std::vector<std::string>& values) {
  const std::string base_text = read_scenario_text(args.scenario_path);
  nlohmann::json base = nlohmann::json::parse(base_text);
  const nlohmann::json::json_pointer where(dotted_to_pointer(param));

  int exit_code = 0;
  for (const std::string& value : values) {
    nlohmann::json doc = base;
    doc[where] = parse_value_literal(value);

    CommonArgs point = args;
    point.scenario_path.clear();
    RunConfig cfg = make_config(point, doc.dump());
    const std::string out_dir =
        (std::filesystem::path(args.out_dir) / (param + "=" + value)).string();
    std::printf("== %s = %s ==\n", param.c_str(), value.c_str());
    const int rc = run_and_export(cfg, out_dir, false);
    if (rc != 0) exit_code = rc;
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Downlink simulator for drone-assisted cellular networks"};
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Monte Carlo run over one or more modes");
  add_common(run, run_args, "baseline,distributed,daa");
  run->add_option("--mode,--modes", run_args.modes,
                  "Modes: baseline, distributed, daa, reversed (repeat or comma-separate)");

  CommonArgs cmp_args;
  CLI::App* cmp = app.add_subcommand("compare", "Run several modes and print mean-rate ratios");
  add_common(cmp, cmp_args, "distributed,daa,baseline");
  cmp->add_option("--modes,--mode", cmp_args.modes, "Modes to compare (comma-separated)");

  CommonArgs sweep_args;
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "Repeat a run across values of one config key");
  add_common(sweep, sweep_args, "distributed,daa");
  sweep->add_option("--mode,--modes", sweep_args.modes, "Modes to run at each sweep point");
  sweep->add_option("--param", sweep_param, "Dotted config key, e.g. num_uavs or solver.swarm.size")
      ->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values for the key")
      ->required()
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      return run_and_export(make_config(run_args, read_scenario_text(run_args.scenario_path)),
                            run_args.out_dir, false);
    }
    if (cmp->parsed()) {
      return run_and_export(make_config(cmp_args, read_scenario_text(cmp_args.scenario_path)),
                            cmp_args.out_dir, true);
    }
    return run_sweep(sweep_args, sweep_param, sweep_values);
  } catch (const uavsim::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
  } catch (const uavsim::ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
  } catch (const uavsim::IoError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
