#pragma once

#include <cstdint>

namespace detlim {

// SplitMix64 (Steele/Lea/Vigna 2014). Chosen because it is a splittable,
// counter-style generator defined purely over 64-bit integer arithmetic, so
// every (seed, call sequence) pair gives the same stream on every platform.
// All reproducibility guarantees in this library rest on it.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next_u64() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 random mantissa bits.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return next_unit() < p; }

  // Uniform integer in [0, bound), debiased by rejection.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - bound) % bound;
    std::uint64_t x = next_u64();
    while (limit != 0 && x >= limit) x = next_u64();
    return x % bound;
  }

 private:
  std::uint64_t state_;
};

// SplitMix64 finalizer as a stand-alone 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic sub-stream seed for (seed, stream): seed XOR hash(stream).
// Used for per-patch, per-trial and per-run streams so that parallel and
// sequential execution draw identical randomness.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL);
}

}  // namespace detlim
