#pragma once

// Counter-based seed derivation: every Monte Carlo sample gets its own engine
// seeded by mix(master_seed, experiment_id, sample_index), so results do not
// depend on thread count or scheduling.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "slelab/params.hpp"

namespace slelab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t master_seed,
                              std::string_view experiment_id,
                              std::uint64_t sample_index) {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ fnv1a64(experiment_id));
  s = splitmix64(s ^ sample_index);
  return s;
}

// mt19937_64 plus explicit 53-bit uniforms and Box-Muller normals, so the
// stream is fully pinned down by the seed (no library-defined distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  Rng(std::uint64_t master_seed, std::string_view experiment_id,
      std::uint64_t sample_index)
      : eng_(mix_seed(master_seed, experiment_id, sample_index)) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe to take logarithms of.
  double uniform_pos() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double t = 2.0 * kPi * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace slelab
