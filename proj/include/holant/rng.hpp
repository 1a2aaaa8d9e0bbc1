#pragma once

#include <cstdint>

namespace holant {

// SplitMix64 finalizer (Steele/Lea/Flood 2014). Every random stream in the
// library is produced by this mix applied to a Weyl sequence, so outputs are
// bit-identical across platforms and independent of call-site ordering.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d4a2c62d02b3c5ULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kWeylGamma = 0x9e3779b97f4a7c15ULL;

// Counter-based generator: the i-th output is mix64(seed + i*gamma).
class Rng {
public:
  explicit constexpr Rng(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept { return mix64(state_ += kWeylGamma); }

  // 53-bit uniform in [0, 1).
  double next_double() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n) via 128-bit multiply-high (n >= 1).
  std::uint32_t next_below(std::uint32_t n) noexcept {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

private:
  std::uint64_t state_;
};

// Seed of the index-th derived stream. This is the single splitting rule
// used for batches, sweeps and nested subtasks.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master ^ mix64((index + 1) * kWeylGamma));
}

}  // namespace holant
