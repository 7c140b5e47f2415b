#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace prunadag {

/// Seedable source of uniform and normal variates.
///
/// Bits come from std::mt19937_64 (the standard 64-bit Mersenne Twister,
/// fully specified by the C++ standard). Uniforms take the top 53 bits;
/// normals use the Box-Muller transform and cache the second variate. None of
/// the std:: distributions are used, so streams are identical across
/// standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal.
  double normal();
  /// Uniform integer on [0, n); n must be positive.
  std::size_t below(std::size_t n);
  /// Fisher-Yates permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Derives an independent stream seed from a master seed and two labels.
/// seed = mix64(mix64(mix64(master) ^ a) ^ (b + golden)), golden = 0x9e3779b97f4a7c15.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

}  // namespace prunadag
