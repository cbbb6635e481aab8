#pragma once

#include <cstdint>
#include <random>

// Deterministic random streams. std::mt19937_64 output is pinned by the
// standard; the distribution transforms live here because the std
// distribution algorithms are implementation-defined and would break
// byte-level reproducibility across toolchains.

namespace dvspix {

/// splitmix64 finalizer, used to spread seed material.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream for one pixel, decorrelated from its neighbours.
  static RandomStream for_pixel(std::uint64_t seed, int x, int y) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)));
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(y)));
    return RandomStream(h);
  }

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (two uniforms per draw).
  double normal();

  /// Inverse Gaussian IG(mean, shape) via the Michael-Schucany-Haas
  /// transform: one chi-square(1) candidate, one uniform to pick the root.
  double inverse_gaussian(double mean, double shape);

 private:
  std::mt19937_64 engine_;
};

}  // namespace dvspix
