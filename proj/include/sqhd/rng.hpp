#pragma once

#include <cstdint>
#include <random>

namespace sqhd {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for stream `index` under `master`. Stable across platforms.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Seeded random stream. The std distributions are implementation-defined,
/// so integer and real draws are done here on top of the raw 64-bit engine
/// to keep datasets and trajectories bit-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform on {0, ..., n-1}; unbiased (rejection on the top range).
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform on {lo, ..., hi}.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sqhd
