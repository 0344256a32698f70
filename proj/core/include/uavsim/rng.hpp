#pragma once

#include <cstdint>
#include <random>

#include "uavsim/types.hpp"

namespace uavsim {

// splitmix64 finalizer. Used to build independent sub-seeds from a master
// seed plus integer tags (trial index, link ids, ...). One stage per tag
// keeps derivations order-sensitive: derive(s, a, b) != derive(s, b, a).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  // the tag is spread by a large odd constant so (seed, tag) pairs like
  // (5, 1) and (6, 0) do not alias before the finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL + tag * 0xd1342543de82ef95ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t master, Tags... tags) {
  std::uint64_t s = mix_seed(master, 0);
  ((s = mix_seed(s, static_cast<std::uint64_t>(tags))), ...);
  return s;
}

// Thin RNG wrapper. The engine is the standard mt19937_64; the mappings to
// doubles are spelled out here instead of using std::*_distribution so the
// stream of values is identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  int uniform_int(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

  // standard normal via Box-Muller (no spare caching, two uniforms per call)
  double gaussian() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // circularly symmetric complex gaussian CN(0,1): unit mean square magnitude
  cdouble cgaussian() {
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-std::log(u1));
    return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
  }

 private:
  // uniform in (0, 1], safe as a log() argument
  double uniform_pos() { return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; }

  std::mt19937_64 eng_;
};

}  // namespace uavsim
