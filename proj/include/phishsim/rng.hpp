#pragma once

#include <cstdint>

namespace phishsim {

/// SplitMix64: a 64-bit counter-based generator (output j is a bijective mix
/// of state0 + j*gamma). Chosen for cross-platform bit reproducibility and
/// cheap stream splitting; quality is ample for desk-scale Monte Carlo.
///
/// Stream derivation: `for_stream(master_seed, index)` seeds the generator
/// with mix(master_seed ^ mix(index + gamma)), so every (seed, index) pair
/// yields the same stream on every platform and distinct indices land in
/// well-separated regions of the state space.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 for_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
    return SplitMix64(mix(master_seed ^ mix(stream_index + kGamma)));
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t state_;
};

}  // namespace phishsim
