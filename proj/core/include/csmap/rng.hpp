#pragma once

#include <cmath>
#include <cstdint>

namespace csmap {

/// Stream tags for deriving independent sub-seeds from one master seed.
/// Keeping these stable keeps every seeded artifact byte-reproducible.
enum class SeedStream : std::uint64_t {
  Imu = 1,
  Bsm = 2,
  Estimate = 3,
  Dataset = 4,
  TrainInit = 5,
  TrainShuffle = 6,
  TrainSplit = 7,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Splitmix-style seed derivation: (master, stream, index) -> independent seed.
/// Pure, so callers may derive per-item seeds in any order (or in parallel).
inline std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                 std::uint64_t index) {
  std::uint64_t s = master;
  s ^= splitmix64(s) + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(stream) + 1);
  s ^= splitmix64(s) + 0xC2B2AE3D27D4EB4Full * (index + 1);
  return splitmix64(s);
}

/// Small deterministic generator over a splitmix64 stream.
/// Gaussians use Box-Muller so draws are identical on every platform.
/// The constructor scrambles the seed so that even naive sequential seeds
/// (0, 1, 2, ...) land on well-separated streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    state_ = splitmix64(state_) ^ (seed * 0xDA942042E4DD58B5ull);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Unbiased integer in [0, n) by rejection.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal draw; consumes exactly two uniforms.
  double gaussian() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace csmap
