#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavsim/channel.hpp"
#include "uavsim/daa.hpp"
#include "uavsim/rng.hpp"
#include "uavsim/solver_params.hpp"
#include "uavsim/types.hpp"

namespace uavsim {

enum class UserDistribution {
  dual_cluster,   // one far hotspot plus donor-adjacent users
  multi_cluster,  // several hotspots spread over the region
  generic,        // clustered fraction plus uniform remainder
};

// Full description of one network instance. Default values are the reference
// configuration used throughout; a config file only overrides what it names.
struct Scenario {
  // geometry. The region extent is sized so that remote user hotspots sit
  // beyond the donor's direct service radius but within reach of a
  // backhauled drone: with the default budgets, noise and pathloss, the
  // donor covers roughly 280 m and a drone's backhaul tether is ~220 m.
  Vec3 donor_pos{250.0, 250.0, 25.0};
  double region_x = 500.0;           // users and drones live in [0, region_x] x [0, region_y]
  double region_y = 500.0;
  double user_height = 1.5;
  double z_min = 20.0;               // drone altitude bounds
  double z_max = 150.0;

  // radio
  int n_antennas = 64;
  int num_uavs = 4;
  double donor_budget_watt = 39.810717055349734;   // 46 dBm
  double uav_budget_watt = 3.981071705534973;      // 36 dBm
  double noise_watt = 3.9810717055349695e-14;      // -104 dBm
  double eps_user = 1.9952623149688795;            // 3 dB
  double eps_backhaul = 1.9952623149688795;        // 3 dB
  double bandwidth_hz = 20e6;
  double carrier_hz = 2e9;
  ChannelParams channel;

  // drone antenna array
  double daa_min_separation = 1.0;
  double daa_max_separation = 25.0;
  DaaAxis daa_axis = DaaAxis::coupled;

  // users
  int num_users = 25;
  UserDistribution distribution = UserDistribution::multi_cluster;
  int num_clusters = 4;
  double cluster_stddev = 20.0;
  double clustered_fraction = 0.6;   // generic distribution only
  std::vector<Vec3> users;           // concrete layout; filled by realize_layout when empty

  // solvers
  FixedPointParams fp;
  SwarmParams swarm;
  OuterParams outer;

  // reporting and baseline switches
  bool uniform_shares = false;              // replace resource shares by all-ones
  bool waterfill_per_user_average = false;  // budget equation averaged over users
};

// Throws ValidationError naming the violated requirement.
void validate(const Scenario& sc);

// User layout generators. Cluster centers are drawn in the outer half of the
// region (far from the donor); users get the scenario's user_height.
std::vector<Vec3> gen_dual_cluster(const Scenario& sc, Rng& rng);
std::vector<Vec3> gen_multi_cluster(const Scenario& sc, Rng& rng);
std::vector<Vec3> gen_generic(const Scenario& sc, Rng& rng);

// Returns a copy with `users` filled from the configured distribution unless
// the scenario already carries explicit positions.
Scenario realize_layout(const Scenario& sc, std::uint64_t layout_seed);

// JSON config handling. Powers come in dBm, thresholds in dB, angles in
// degrees; see docs/scenario.schema.md. Unknown keys are rejected.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

}  // namespace uavsim
