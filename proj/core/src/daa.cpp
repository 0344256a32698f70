#include "uavsim/daa.hpp"

#include <cmath>

namespace uavsim {

std::vector<Vec3> element_positions(const DaaConfig& config, int num_elements) {
  if (num_elements < 1) throw DegenerateGeometryError("array needs at least one element");
  if (config.separation <= 0.0) throw DegenerateGeometryError("array separation must be positive");

  Vec3 axis;
  axis.x = std::cos(config.phi) * std::cos(config.theta);
  axis.y = std::cos(config.phi) * std::sin(config.theta);
  axis.z = (config.axis == DaaAxis::coupled) ? std::sin(config.phi) * std::sin(config.theta)
                                             : std::sin(config.phi);

  std::vector<Vec3> out(num_elements);
  for (int d = 0; d < num_elements; ++d) {
    const double offset = config.separation * (num_elements - 2 * (d + 1) + 1) / 2.0;
    out[d] = config.center + offset * axis;
  }
  return out;
}

bool validate_separation(const DaaConfig& config, double min_separation) {
  return config.separation >= min_separation;
}

std::vector<std::vector<int>> form_sdma_groups(int num_users, int group_size) {
  if (group_size < 1) throw Error("sdma group size must be positive");
  std::vector<std::vector<int>> groups;
  for (int start = 0; start < num_users; start += group_size) {
    std::vector<int> g;
    for (int i = start; i < num_users && i < start + group_size; ++i) g.push_back(i);
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace uavsim
