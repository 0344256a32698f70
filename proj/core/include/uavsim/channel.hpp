#pragma once

#include <cstdint>
#include <vector>

#include "uavsim/linalg.hpp"
#include "uavsim/rng.hpp"
#include "uavsim/types.hpp"

namespace uavsim {

struct ChannelParams {
  int num_paths = 6;                    // multipath components per link
  double pathloss_exponent = 3.0;
  double asd_rad = 0.08726646259971647; // angular spread half-width, 5 degrees
  double element_spacing_ratio = 0.5;   // antenna spacing over wavelength
};

// Random content of one link: complex path gains and angular offsets around
// the line-of-sight direction. Geometry stays out of this struct on purpose;
// moving a transmitter re-evaluates the channel with the same draws, so a
// candidate deployment always sees a deterministic fading landscape.
struct LinkDraws {
  std::vector<cdouble> gains;          // CN(0,1) per path
  std::vector<double> angle_offsets;   // uniform in [-asd, +asd] per path
};

// Draw order is fixed (all gains, then all offsets) so seeded streams are
// reproducible across call sites.
LinkDraws sample_link_draws(Rng& rng, const ChannelParams& params);

// n x 1 array response of a uniform linear array, unit Euclidean norm.
ComplexMatrix steering_vector(double theta, int n, double spacing_ratio);

// Azimuth of rx seen from tx, measured in the horizontal plane from the
// array axis. Coincident positions have no direction and raise an error.
double los_azimuth(const Vec3& tx, const Vec3& rx);

// Channel rows assembled from fixed draws plus geometry. Magnitudes decay
// with 1/(1 + d^alpha); per-path departure angles are los + offset.
ComplexMatrix assemble_miso(const LinkDraws& draws, double theta_los, double dist, int n,
                            const ChannelParams& params);
cdouble assemble_siso(const LinkDraws& draws, double dist, const ChannelParams& params);

// Convenience samplers that draw fresh link content and assemble in one step.
ComplexMatrix sample_miso_channel(Rng& rng, const ChannelParams& params, const Vec3& tx,
                                  const Vec3& rx, int n);
cdouble sample_siso_channel(Rng& rng, const ChannelParams& params, const Vec3& tx, const Vec3& rx);

// Composite 1 x D row of a drone antenna array: per-element single-antenna
// channels scaled by 1/sqrt(D). Each element gets its own engine seeded from
// one u64 drawn off rng, in element order.
ComplexMatrix sample_daa_channel(Rng& rng, const ChannelParams& params,
                                 const std::vector<Vec3>& element_pos, const Vec3& rx);
ComplexMatrix assemble_daa_row(const std::vector<const LinkDraws*>& element_draws,
                               const std::vector<Vec3>& element_pos, const Vec3& rx,
                               const ChannelParams& params);

// All random link content for one Monte Carlo trial, every link seeded
// independently from the trial seed and stable link ids. Drone-side draws are
// shared between deployment modes; only geometry differs.
struct TrialChannels {
  int num_uavs = 0;
  int num_users = 0;
  ChannelParams params;
  std::vector<LinkDraws> donor_user;               // per user
  std::vector<LinkDraws> donor_uav;                // per drone (or array element)
  std::vector<std::vector<LinkDraws>> uav_user;    // [drone][user]
  std::vector<std::vector<LinkDraws>> uav_uav;     // [tx drone][rx drone], diagonal unused
};

TrialChannels sample_trial_channels(std::uint64_t seed, int num_uavs, int num_users,
                                    const ChannelParams& params);

// Channels assembled for one concrete geometry.
struct ChannelSet {
  ComplexMatrix donor_user;                        // U x N, one row per user
  ComplexMatrix donor_uav;                         // D x N, one row per drone/element
  std::vector<std::vector<cdouble>> uav_user;      // [drone][user]
  std::vector<std::vector<cdouble>> uav_uav;       // [tx][rx]
  ComplexMatrix daa_user;                          // U x D rows, only in array mode
};

ComplexMatrix build_donor_user_rows(const TrialChannels& trial, const Vec3& donor,
                                    const std::vector<Vec3>& users, int n_antennas);

// Fill the deployment-dependent members of a ChannelSet. donor_user must
// already be present (it does not depend on drone positions).
void build_distributed_links(const TrialChannels& trial, const Vec3& donor,
                             const std::vector<Vec3>& users, const std::vector<Vec3>& uav_pos,
                             int n_antennas, ChannelSet* out);
void build_daa_links(const TrialChannels& trial, const Vec3& donor, const std::vector<Vec3>& users,
                     const std::vector<Vec3>& element_pos, int n_antennas, ChannelSet* out);

}  // namespace uavsim
