#include "uavsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace uavsim {

namespace {
using njson = nlohmann::json;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Cluster centers go to the outer half of the region: at least half the
// maximum donor-to-corner distance away from the donor, so hotspots are
// genuinely remote from the donor site.
Vec3 draw_remote_center(const Scenario& sc, Rng& rng) {
  double max_corner = 0.0;
  for (double cx : {0.0, sc.region_x}) {
    for (double cy : {0.0, sc.region_y}) {
      const double dx = cx - sc.donor_pos.x;
      const double dy = cy - sc.donor_pos.y;
      max_corner = std::max(max_corner, std::hypot(dx, dy));
    }
  }
  const double min_dist = 0.5 * max_corner;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Vec3 c{rng.uniform(0.0, sc.region_x), rng.uniform(0.0, sc.region_y), 0.0};
    if (std::hypot(c.x - sc.donor_pos.x, c.y - sc.donor_pos.y) >= min_dist) return c;
  }
  throw DegenerateGeometryError("could not place a cluster center away from the donor");
}

Vec3 gaussian_around(const Vec3& center, double stddev, double height, const Scenario& sc,
                     Rng& rng) {
  Vec3 p;
  p.x = clamp(center.x + stddev * rng.gaussian(), 0.0, sc.region_x);
  p.y = clamp(center.y + stddev * rng.gaussian(), 0.0, sc.region_y);
  p.z = height;
  return p;
}

std::vector<Vec3> clustered_users(const Scenario& sc, Rng& rng, int count,
                                  const std::vector<Vec3>& centers) {
  std::vector<Vec3> users;
  users.reserve(count);
  for (int i = 0; i < count; ++i) {
    const Vec3& c = centers[i % centers.size()];
    users.push_back(gaussian_around(c, sc.cluster_stddev, sc.user_height, sc, rng));
  }
  return users;
}
}  // namespace

std::vector<Vec3> gen_dual_cluster(const Scenario& sc, Rng& rng) {
  const Vec3 hotspot = draw_remote_center(sc, rng);
  const int hot_count = static_cast<int>(std::lround(0.75 * sc.num_users));
  std::vector<Vec3> users;
  users.reserve(sc.num_users);
  for (int i = 0; i < hot_count; ++i) {
    users.push_back(gaussian_around(hotspot, sc.cluster_stddev, sc.user_height, sc, rng));
  }
  // remainder stays donor-adjacent with a wider spread
  for (int i = hot_count; i < sc.num_users; ++i) {
    users.push_back(gaussian_around(sc.donor_pos, 3.0 * sc.cluster_stddev, sc.user_height, sc, rng));
  }
  return users;
}

std::vector<Vec3> gen_multi_cluster(const Scenario& sc, Rng& rng) {
  std::vector<Vec3> centers;
  const double min_gap = 4.0 * sc.cluster_stddev;
  for (int c = 0; c < sc.num_clusters; ++c) {
    Vec3 center;
    bool placed = false;
    for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
      center = draw_remote_center(sc, rng);
      placed = std::all_of(centers.begin(), centers.end(), [&](const Vec3& o) {
        return std::hypot(center.x - o.x, center.y - o.y) >= min_gap;
      });
    }
    centers.push_back(center);  // after enough attempts, accept overlap
  }
  return clustered_users(sc, rng, sc.num_users, centers);
}

std::vector<Vec3> gen_generic(const Scenario& sc, Rng& rng) {
  const int clustered = static_cast<int>(std::lround(sc.clustered_fraction * sc.num_users));
  Scenario tmp = sc;
  tmp.num_users = clustered;
  std::vector<Vec3> users = gen_multi_cluster(tmp, rng);
  for (int i = clustered; i < sc.num_users; ++i) {
    users.push_back(
        Vec3{rng.uniform(0.0, sc.region_x), rng.uniform(0.0, sc.region_y), sc.user_height});
  }
  return users;
}

Scenario realize_layout(const Scenario& sc, std::uint64_t layout_seed) {
  Scenario out = sc;
  if (!out.users.empty()) {
    out.num_users = static_cast<int>(out.users.size());
    return out;
  }
  Rng rng(layout_seed);
  switch (sc.distribution) {
    case UserDistribution::dual_cluster: out.users = gen_dual_cluster(sc, rng); break;
    case UserDistribution::multi_cluster: out.users = gen_multi_cluster(sc, rng); break;
    case UserDistribution::generic: out.users = gen_generic(sc, rng); break;
  }
  return out;
}

void validate(const Scenario& sc) {
  auto fail = [](const std::string& msg) { throw ValidationError("scenario: " + msg); };

  if (sc.n_antennas < 1) fail("antennas must be at least 1");
  if (sc.num_uavs < 0) fail("num_uavs must be non-negative");
  if (sc.num_uavs + 1 > sc.n_antennas) {
    fail("donor needs num_uavs + 1 <= antennas to separate backhaul and direct streams");
  }
  if (sc.num_users < 1 && sc.users.empty()) fail("at least one user is required");
  if (sc.donor_budget_watt <= 0.0) fail("donor power budget must be positive");
  if (sc.uav_budget_watt <= 0.0) fail("drone power budget must be positive");
  if (sc.noise_watt <= 0.0) fail("noise power must be positive");
  if (sc.eps_user <= 0.0) fail("user SINR threshold must be positive");
  if (sc.eps_backhaul <= 0.0) fail("backhaul SINR threshold must be positive");
  if (sc.bandwidth_hz <= 0.0) fail("bandwidth must be positive");
  if (sc.region_x <= 0.0 || sc.region_y <= 0.0) fail("region extents must be positive");
  if (!(sc.donor_pos.x >= 0.0 && sc.donor_pos.x <= sc.region_x && sc.donor_pos.y >= 0.0 &&
        sc.donor_pos.y <= sc.region_y)) {
    fail("donor must sit inside the region");
  }
  if (sc.z_min <= 0.0 || sc.z_min >= sc.z_max) fail("drone altitude bounds need 0 < z_min < z_max");
  if (sc.user_height < 0.0) fail("user height must be non-negative");
  if (sc.channel.num_paths < 1) fail("channel needs at least one path");
  if (sc.channel.pathloss_exponent <= 0.0) fail("pathloss exponent must be positive");
  if (sc.channel.asd_rad < 0.0) fail("angular spread must be non-negative");
  if (sc.channel.element_spacing_ratio <= 0.0) fail("element spacing ratio must be positive");
  if (sc.daa_min_separation <= 0.0 || sc.daa_min_separation > sc.daa_max_separation) {
    fail("array separation bounds need 0 < min <= max");
  }
  if (sc.num_clusters < 1) fail("num_clusters must be at least 1");
  if (sc.cluster_stddev <= 0.0) fail("cluster stddev must be positive");
  if (sc.clustered_fraction < 0.0 || sc.clustered_fraction > 1.0) {
    fail("clustered_fraction must lie in [0, 1]");
  }
  for (std::size_t i = 0; i < sc.users.size(); ++i) {
    const Vec3& u = sc.users[i];
    if (u.x < 0.0 || u.x > sc.region_x || u.y < 0.0 || u.y > sc.region_y) {
      fail("user " + std::to_string(i) + " lies outside the region");
    }
  }
  if (sc.fp.max_iters < 1) fail("fixed_point.max_iters must be at least 1");
  if (sc.fp.eps_power < 0.0 || sc.fp.eps_backhaul < 0.0) fail("fixed point tolerances must be non-negative");
  if (sc.swarm.swarm_size < 1) fail("swarm.size must be at least 1");
  if (sc.swarm.max_iters < 1) fail("swarm.max_iters must be at least 1");
  if (sc.swarm.window < 2 || sc.swarm.window_array < 2) fail("swarm window must be at least 2");
  if (sc.swarm.spread_lo > sc.swarm.spread_hi) fail("swarm spread needs lo <= hi");
  if (sc.outer.max_iters < 1) fail("outer.max_iters must be at least 1");
}

namespace {

void require_keys(const njson& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ValidationError("scenario: unknown key '" + where + it.key() + "'");
  }
}

Vec3 parse_vec3(const njson& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("scenario: " + what + " must be [x, y, z]");
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
void opt(const njson& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  njson doc;
  try {
    doc = njson::parse(json_text);
  } catch (const njson::parse_error& e) {
    throw ParseError(std::string("scenario config: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario config: top level must be an object");

  Scenario sc;
  try {
    require_keys(doc, "", {"donor", "region_m", "num_uavs", "users", "budgets", "thresholds",
                           "noise_dbm", "bandwidth_hz", "carrier_hz", "channel", "placement",
                           "daa", "solver", "reporting", "baseline"});

    if (doc.contains("donor")) {
      const njson& d = doc["donor"];
      require_keys(d, "donor.", {"position_m", "antennas"});
      if (d.contains("position_m")) sc.donor_pos = parse_vec3(d["position_m"], "donor.position_m");
      opt(d, "antennas", sc.n_antennas);
    }
    if (doc.contains("region_m")) {
      const njson& r = doc["region_m"];
      if (!r.is_array() || r.size() != 2) throw ValidationError("scenario: region_m must be [x, y]");
      sc.region_x = r[0].get<double>();
      sc.region_y = r[1].get<double>();
    }
    opt(doc, "num_uavs", sc.num_uavs);
    if (doc.contains("users")) {
      const njson& u = doc["users"];
      require_keys(u, "users.", {"count", "distribution", "num_clusters", "cluster_stddev_m",
                                 "clustered_fraction", "height_m", "positions_m"});
      opt(u, "count", sc.num_users);
      if (u.contains("distribution")) {
        const std::string name = u["distribution"].get<std::string>();
        if (name == "dual_cluster") sc.distribution = UserDistribution::dual_cluster;
        else if (name == "multi_cluster") sc.distribution = UserDistribution::multi_cluster;
        else if (name == "generic") sc.distribution = UserDistribution::generic;
        else throw ValidationError("scenario: unknown users.distribution '" + name + "'");
      }
      opt(u, "num_clusters", sc.num_clusters);
      opt(u, "cluster_stddev_m", sc.cluster_stddev);
      opt(u, "clustered_fraction", sc.clustered_fraction);
      opt(u, "height_m", sc.user_height);
      if (u.contains("positions_m")) {
        for (const njson& p : u["positions_m"]) {
          sc.users.push_back(parse_vec3(p, "users.positions_m entry"));
        }
        sc.num_users = static_cast<int>(sc.users.size());
      }
    }
    if (doc.contains("budgets")) {
      const njson& b = doc["budgets"];
      require_keys(b, "budgets.", {"donor_max_dbm", "uav_max_dbm"});
      if (b.contains("donor_max_dbm")) sc.donor_budget_watt = dbm_to_watt(b["donor_max_dbm"].get<double>());
      if (b.contains("uav_max_dbm")) sc.uav_budget_watt = dbm_to_watt(b["uav_max_dbm"].get<double>());
    }
    if (doc.contains("thresholds")) {
      const njson& t = doc["thresholds"];
      require_keys(t, "thresholds.", {"user_min_sinr_db", "backhaul_min_sinr_db"});
      if (t.contains("user_min_sinr_db")) sc.eps_user = db_to_linear(t["user_min_sinr_db"].get<double>());
      if (t.contains("backhaul_min_sinr_db")) {
        sc.eps_backhaul = db_to_linear(t["backhaul_min_sinr_db"].get<double>());
      }
    }
    if (doc.contains("noise_dbm")) sc.noise_watt = dbm_to_watt(doc["noise_dbm"].get<double>());
    opt(doc, "bandwidth_hz", sc.bandwidth_hz);
    opt(doc, "carrier_hz", sc.carrier_hz);
    if (doc.contains("channel")) {
      const njson& c = doc["channel"];
      require_keys(c, "channel.",
                   {"num_paths", "pathloss_exponent", "asd_deg", "element_spacing_ratio"});
      opt(c, "num_paths", sc.channel.num_paths);
      opt(c, "pathloss_exponent", sc.channel.pathloss_exponent);
      if (c.contains("asd_deg")) sc.channel.asd_rad = deg_to_rad(c["asd_deg"].get<double>());
      opt(c, "element_spacing_ratio", sc.channel.element_spacing_ratio);
    }
    if (doc.contains("placement")) {
      const njson& p = doc["placement"];
      require_keys(p, "placement.", {"z_min_m", "z_max_m"});
      opt(p, "z_min_m", sc.z_min);
      opt(p, "z_max_m", sc.z_max);
    }
    if (doc.contains("daa")) {
      const njson& d = doc["daa"];
      require_keys(d, "daa.", {"min_separation_m", "max_separation_m", "axis"});
      opt(d, "min_separation_m", sc.daa_min_separation);
      opt(d, "max_separation_m", sc.daa_max_separation);
      if (d.contains("axis")) {
        const std::string axis = d["axis"].get<std::string>();
        if (axis == "coupled") sc.daa_axis = DaaAxis::coupled;
        else if (axis == "spherical") sc.daa_axis = DaaAxis::spherical;
        else throw ValidationError("scenario: unknown daa.axis '" + axis + "'");
      }
    }
    if (doc.contains("solver")) {
      const njson& s = doc["solver"];
      require_keys(s, "solver.", {"fixed_point", "swarm", "outer"});
      if (s.contains("fixed_point")) {
        const njson& f = s["fixed_point"];
        require_keys(f, "solver.fixed_point.",
                     {"max_iters", "eps_power_watt", "eps_backhaul_watt", "eps_assoc"});
        opt(f, "max_iters", sc.fp.max_iters);
        opt(f, "eps_power_watt", sc.fp.eps_power);
        opt(f, "eps_backhaul_watt", sc.fp.eps_backhaul);
        opt(f, "eps_assoc", sc.fp.eps_assoc);
      }
      if (s.contains("swarm")) {
        const njson& w = s["swarm"];
        require_keys(w, "solver.swarm.",
                     {"size", "max_iters", "inertia", "cognitive", "social", "spread", "window",
                      "window_array", "eps_rel", "penalty_user", "penalty_backhaul"});
        opt(w, "size", sc.swarm.swarm_size);
        opt(w, "max_iters", sc.swarm.max_iters);
        if (w.contains("inertia")) {
          const njson& in = w["inertia"];
          if (!in.is_array() || in.size() != 2) {
            throw ValidationError("scenario: solver.swarm.inertia must be [end, start]");
          }
          sc.swarm.inertia_end = in[0].get<double>();
          sc.swarm.inertia_start = in[1].get<double>();
        }
        opt(w, "cognitive", sc.swarm.cognitive);
        opt(w, "social", sc.swarm.social);
        if (w.contains("spread")) {
          const njson& sp = w["spread"];
          if (!sp.is_array() || sp.size() != 2) {
            throw ValidationError("scenario: solver.swarm.spread must be [lo, hi]");
          }
          sc.swarm.spread_lo = sp[0].get<double>();
          sc.swarm.spread_hi = sp[1].get<double>();
        }
        opt(w, "window", sc.swarm.window);
        opt(w, "window_array", sc.swarm.window_array);
        opt(w, "eps_rel", sc.swarm.eps_rel);
        opt(w, "penalty_user", sc.swarm.penalty_user);
        opt(w, "penalty_backhaul", sc.swarm.penalty_backhaul);
      }
      if (s.contains("outer")) {
        const njson& o = s["outer"];
        require_keys(o, "solver.outer.", {"max_iters", "eps_assoc", "eps_deploy_m", "eps_rate"});
        opt(o, "max_iters", sc.outer.max_iters);
        opt(o, "eps_assoc", sc.outer.eps_assoc);
        opt(o, "eps_deploy_m", sc.outer.eps_deploy);
        opt(o, "eps_rate", sc.outer.eps_rate);
      }
    }
    if (doc.contains("reporting")) {
      const njson& r = doc["reporting"];
      require_keys(r, "reporting.", {"uniform_shares"});
      opt(r, "uniform_shares", sc.uniform_shares);
    }
    if (doc.contains("baseline")) {
      const njson& b = doc["baseline"];
      require_keys(b, "baseline.", {"waterfill_per_user_average"});
      opt(b, "waterfill_per_user_average", sc.waterfill_per_user_average);
    }
  } catch (const njson::exception& e) {
    throw ValidationError(std::string("scenario config: ") + e.what());
  }

  validate(sc);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace uavsim
