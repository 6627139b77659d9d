#pragma once

#include <cstdint>
#include <random>

namespace gwl {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for sub-stream `stream` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Portable random source. The distributions are implemented here rather
/// than through <random> adaptors so a seed reproduces the same draws on
/// every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Box-Muller, one value per call).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace gwl
