#pragma once

// Portable Gaussian noise source.
//
// std::mt19937_64 has a sequence fixed by the standard, but the standard
// distributions do not, so the uniform conversion and the Gaussian transform
// are done here:
//   uniform  u = (word >> 11) * 2^-53, remapped to (0, 1]
//   gaussian Box-Muller, both outputs of a pair used in order
// Seeds are expanded through splitmix64 before reaching the engine.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sino2d {

/// One splitmix64 step applied to `x` (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream seed for item `index` of a family rooted at `base`.
/// Order-insensitive: trial t's seed never depends on trials < t.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(base ^ splitmix64(index));
}

class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform in (0, 1].
  double uniform() {
    const std::uint64_t word = engine_() >> 11;
    return (static_cast<double>(word) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal draw.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sino2d
