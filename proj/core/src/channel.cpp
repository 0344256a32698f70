#include "uavsim/channel.hpp"

#include <cmath>

namespace uavsim {

LinkDraws sample_link_draws(Rng& rng, const ChannelParams& params) {
  LinkDraws d;
  d.gains.resize(params.num_paths);
  d.angle_offsets.resize(params.num_paths);
  for (int k = 0; k < params.num_paths; ++k) d.gains[k] = rng.cgaussian();
  for (int k = 0; k < params.num_paths; ++k) {
    d.angle_offsets[k] = rng.uniform(-params.asd_rad, params.asd_rad);
  }
  return d;
}

ComplexMatrix steering_vector(double theta, int n, double spacing_ratio) {
  ComplexMatrix a(static_cast<std::size_t>(n), 1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double phase = -2.0 * kPi * spacing_ratio * std::sin(theta);
  const cdouble step{std::cos(phase), std::sin(phase)};
  cdouble cur{1.0, 0.0};
  for (int m = 0; m < n; ++m) {
    a(m, 0) = scale * cur;
    cur *= step;
  }
  return a;
}

double los_azimuth(const Vec3& tx, const Vec3& rx) {
  if (distance(tx, rx) == 0.0) {
    throw DegenerateGeometryError("coincident transmitter and receiver");
  }
  return std::atan2(rx.y - tx.y, rx.x - tx.x);
}

ComplexMatrix assemble_miso(const LinkDraws& draws, double theta_los, double dist, int n,
                            const ChannelParams& params) {
  ComplexMatrix h(1, static_cast<std::size_t>(n));
  const int paths = static_cast<int>(draws.gains.size());
  const double attenuation = 1.0 + std::pow(dist, params.pathloss_exponent);
  const double scale = 1.0 / (std::sqrt(static_cast<double>(paths) * n) * attenuation);
  for (int k = 0; k < paths; ++k) {
    // conjugated array response unrolled as a running phasor per path
    const double phase = 2.0 * kPi * params.element_spacing_ratio *
                         std::sin(theta_los + draws.angle_offsets[k]);
    const cdouble step{std::cos(phase), std::sin(phase)};
    const cdouble g = scale * draws.gains[k];
    cdouble cur{1.0, 0.0};
    for (int m = 0; m < n; ++m) {
      h(0, m) += g * cur;
      cur *= step;
    }
  }
  return h;
}

cdouble assemble_siso(const LinkDraws& draws, double dist, const ChannelParams& params) {
  const int paths = static_cast<int>(draws.gains.size());
  const double attenuation = 1.0 + std::pow(dist, params.pathloss_exponent);
  cdouble sum{};
  for (const cdouble& g : draws.gains) sum += g;
  return sum / (std::sqrt(static_cast<double>(paths)) * attenuation);
}

ComplexMatrix sample_miso_channel(Rng& rng, const ChannelParams& params, const Vec3& tx,
                                  const Vec3& rx, int n) {
  const double theta = los_azimuth(tx, rx);
  const double dist = distance(tx, rx);
  const LinkDraws draws = sample_link_draws(rng, params);
  return assemble_miso(draws, theta, dist, n, params);
}

cdouble sample_siso_channel(Rng& rng, const ChannelParams& params, const Vec3& tx, const Vec3& rx) {
  const double dist = distance(tx, rx);
  if (dist == 0.0) throw DegenerateGeometryError("coincident transmitter and receiver");
  const LinkDraws draws = sample_link_draws(rng, params);
  return assemble_siso(draws, dist, params);
}

ComplexMatrix sample_daa_channel(Rng& rng, const ChannelParams& params,
                                 const std::vector<Vec3>& element_pos, const Vec3& rx) {
  const std::size_t d = element_pos.size();
  ComplexMatrix row(1, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t e = 0; e < d; ++e) {
    Rng sub(rng.next_u64());
    row(0, e) = scale * sample_siso_channel(sub, params, element_pos[e], rx);
  }
  return row;
}

ComplexMatrix assemble_daa_row(const std::vector<const LinkDraws*>& element_draws,
                               const std::vector<Vec3>& element_pos, const Vec3& rx,
                               const ChannelParams& params) {
  const std::size_t d = element_pos.size();
  ComplexMatrix row(1, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t e = 0; e < d; ++e) {
    row(0, e) = scale * assemble_siso(*element_draws[e], distance(element_pos[e], rx), params);
  }
  return row;
}

namespace {
enum LinkKind : std::uint64_t {
  kDonorUser = 1,
  kDonorUav = 2,
  kUavUser = 3,
  kUavUav = 4,
};

LinkDraws draws_for(std::uint64_t seed, std::uint64_t kind, std::uint64_t i, std::uint64_t j,
                    const ChannelParams& params) {
  Rng rng(derive_seed(seed, kind, i, j));
  return sample_link_draws(rng, params);
}
}  // namespace

TrialChannels sample_trial_channels(std::uint64_t seed, int num_uavs, int num_users,
                                    const ChannelParams& params) {
  TrialChannels t;
  t.num_uavs = num_uavs;
  t.num_users = num_users;
  t.params = params;
  t.donor_user.reserve(num_users);
  for (int u = 0; u < num_users; ++u) {
    t.donor_user.push_back(draws_for(seed, kDonorUser, 0, u, params));
  }
  t.donor_uav.reserve(num_uavs);
  for (int d = 0; d < num_uavs; ++d) {
    t.donor_uav.push_back(draws_for(seed, kDonorUav, 0, d, params));
  }
  t.uav_user.resize(num_uavs);
  for (int d = 0; d < num_uavs; ++d) {
    t.uav_user[d].reserve(num_users);
    for (int u = 0; u < num_users; ++u) {
      t.uav_user[d].push_back(draws_for(seed, kUavUser, d, u, params));
    }
  }
  t.uav_uav.resize(num_uavs);
  for (int a = 0; a < num_uavs; ++a) {
    t.uav_uav[a].resize(num_uavs);
    for (int b = 0; b < num_uavs; ++b) {
      if (a == b) continue;
      t.uav_uav[a][b] = draws_for(seed, kUavUav, a, b, params);
    }
  }
  return t;
}

ComplexMatrix build_donor_user_rows(const TrialChannels& trial, const Vec3& donor,
                                    const std::vector<Vec3>& users, int n_antennas) {
  ComplexMatrix rows(users.size(), static_cast<std::size_t>(n_antennas));
  for (std::size_t u = 0; u < users.size(); ++u) {
    const ComplexMatrix h = assemble_miso(trial.donor_user[u], los_azimuth(donor, users[u]),
                                          distance(donor, users[u]), n_antennas, trial.params);
    for (int m = 0; m < n_antennas; ++m) rows(u, m) = h(0, m);
  }
  return rows;
}

void build_distributed_links(const TrialChannels& trial, const Vec3& donor,
                             const std::vector<Vec3>& users, const std::vector<Vec3>& uav_pos,
                             int n_antennas, ChannelSet* out) {
  const int d_count = trial.num_uavs;
  const int u_count = trial.num_users;
  out->donor_uav = ComplexMatrix(d_count, static_cast<std::size_t>(n_antennas));
  for (int d = 0; d < d_count; ++d) {
    const ComplexMatrix h = assemble_miso(trial.donor_uav[d], los_azimuth(donor, uav_pos[d]),
                                          distance(donor, uav_pos[d]), n_antennas, trial.params);
    for (int m = 0; m < n_antennas; ++m) out->donor_uav(d, m) = h(0, m);
  }
  out->uav_user.assign(d_count, std::vector<cdouble>(u_count));
  for (int d = 0; d < d_count; ++d) {
    for (int u = 0; u < u_count; ++u) {
      out->uav_user[d][u] =
          assemble_siso(trial.uav_user[d][u], distance(uav_pos[d], users[u]), trial.params);
    }
  }
  out->uav_uav.assign(d_count, std::vector<cdouble>(d_count));
  for (int a = 0; a < d_count; ++a) {
    for (int b = 0; b < d_count; ++b) {
      if (a == b) continue;
      out->uav_uav[a][b] =
          assemble_siso(trial.uav_uav[a][b], distance(uav_pos[a], uav_pos[b]), trial.params);
    }
  }
  out->daa_user = ComplexMatrix();
}

void build_daa_links(const TrialChannels& trial, const Vec3& donor, const std::vector<Vec3>& users,
                     const std::vector<Vec3>& element_pos, int n_antennas, ChannelSet* out) {
  const int d_count = trial.num_uavs;
  const int u_count = trial.num_users;
  out->donor_uav = ComplexMatrix(d_count, static_cast<std::size_t>(n_antennas));
  for (int d = 0; d < d_count; ++d) {
    const ComplexMatrix h =
        assemble_miso(trial.donor_uav[d], los_azimuth(donor, element_pos[d]),
                      distance(donor, element_pos[d]), n_antennas, trial.params);
    for (int m = 0; m < n_antennas; ++m) out->donor_uav(d, m) = h(0, m);
  }
  out->daa_user = ComplexMatrix(u_count, d_count);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_count));
  for (int u = 0; u < u_count; ++u) {
    for (int d = 0; d < d_count; ++d) {
      out->daa_user(u, d) = scale * assemble_siso(trial.uav_user[d][u],
                                                  distance(element_pos[d], users[u]), trial.params);
    }
  }
  out->uav_user.clear();
  out->uav_uav.clear();
}

}  // namespace uavsim
