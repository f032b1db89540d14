#pragma once

#include <cstdint>

namespace sacrc {

// Counter-based pseudo-random generator. Draw n of stream s under seed is
//
//   key  = mix64(seed ^ mix64(s + 0xD1B54A32D192ED03))
//   x[n] = mix64(key + (n + 1) * 0x9E3779B97F4A7C15)
//
// where mix64 is the SplitMix64 finalizer (shifts 30/27/31, multipliers
// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). Uniform doubles take the top
// 53 bits; normals use Box-Muller on two consecutive uniforms. Everything in
// this project that draws randomness goes through this type, so a given
// (seed, stream) reproduces the same values in any implementation.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1).
  double uniform() noexcept;
  /// Uniform on (0, 1].
  double uniform_open_zero() noexcept;
  double normal() noexcept;
  /// Uniform integer in [0, bound); bound must be positive. Uses rejection, no modulo bias.
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace sacrc
