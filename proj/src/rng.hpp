#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace lrsense {

// All randomness in the project flows through the splitmix64 generator
// (Steele/Lea/Flood constants) so that results are reproducible independent
// of platform, standard library, and thread count.
inline constexpr uint64_t kSplitMix64Gamma = 0x9e3779b97f4a7c15ull;

constexpr uint64_t mix_bits(uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stream derivation: mix64(seed, v) = mix_bits((seed + gamma) ^ (v * M)).
// Experiment rows derive their stream as mix64(master_seed, m, r, trial) so
// any single row can be reproduced in isolation.
constexpr uint64_t mix64(uint64_t seed, uint64_t v) noexcept {
  return mix_bits((seed + kSplitMix64Gamma) ^ (v * 0xbf58476d1ce4e5b9ull));
}
constexpr uint64_t mix64(uint64_t seed, uint64_t a, uint64_t b) noexcept {
  return mix64(mix64(seed, a), b);
}
constexpr uint64_t mix64(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) noexcept {
  return mix64(mix64(seed, a, b), c);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) noexcept : state_(seed) {}

  uint64_t next_u64() noexcept {
    state_ += kSplitMix64Gamma;
    return mix_bits(state_);
  }

  // Uniform on [0, 1), 53 mantissa bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe under log().
  double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second deviate is cached.
  double gaussian() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double rademacher() noexcept { return (next_u64() & 1u) ? 1.0 : -1.0; }

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lrsense
