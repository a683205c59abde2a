#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace curator {

// One step of the splitmix64 generator; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

// Stable 64-bit mix of a list of integers. Used to derive independent
// per-unit streams (e.g. seed, timestep, cube index) so results do not
// depend on the order in which units are processed.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

// Seeded random source with platform-independent conversions. The standard
// <random> distributions are implementation-defined, so uniform, bounded
// integer and normal draws are derived here directly from mt19937_64 bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller (one value per call, no caching).
  double normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace curator
