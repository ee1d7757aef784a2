#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace wia {

/// Seeded 64-bit Mersenne Twister. Conversions to uniforms and indices are
/// written out here (not via <random> distributions) so a trace depends only
/// on the seed and the order of draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double prob) { return uniform() < prob; }

  /// Uniform index in [0, n), n >= 1.
  std::size_t pick(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wia
