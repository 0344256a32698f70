#pragma once

#include <vector>

#include "uavsim/types.hpp"

namespace uavsim {

// How the array axis unit vector is built from the two tilt angles. The
// coupled form ties the vertical component to both angles (z = sin(phi) *
// sin(theta)); spherical is the textbook unit vector (z = sin(phi)). Coupled
// is the default.
enum class DaaAxis {
  coupled,
  spherical,
};

// A drone antenna array: D single-antenna drones on a line through a common
// centroid with uniform spacing.
struct DaaConfig {
  Vec3 center;
  double theta = 0.0;     // horizontal rotation
  double phi = 0.0;       // tilt
  double separation = 1.0;
  DaaAxis axis = DaaAxis::coupled;
};

// Element d (0-based) sits at center + separation * (D - 2(d+1) + 1) / 2 on
// the axis, so elements are collinear with the centroid at the center and
// uniform spacing. Note the coupled axis is not always unit length, so the
// physical spacing is separation * |axis|; with the spherical convention (or
// zero tilt) it is exactly `separation`.
std::vector<Vec3> element_positions(const DaaConfig& config, int num_elements);

bool validate_separation(const DaaConfig& config, double min_separation);

// Consecutive index chunks of at most group_size users each.
std::vector<std::vector<int>> form_sdma_groups(int num_users, int group_size);

}  // namespace uavsim
