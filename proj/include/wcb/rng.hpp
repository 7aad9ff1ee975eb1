#pragma once

// Counter-based randomness: every draw is a pure function of
// (seed, stream, epoch, slot, node), so two runs that differ only in which
// slots they execute still see identical outcomes for the slots they share.

#include <cstdint>
#include <random>

namespace wcb::rng {

enum class Stream : std::uint32_t {
  PlantNoise = 1,
  Network = 2,
  FalsePositive = 3,
};

/// Logical slot identifiers; the index distinguishes repeated slots.
enum class SlotKind : std::uint32_t { S = 1, EV, T, A, RecoveryT, RecoveryA, Ctrl, Winner };

constexpr std::uint32_t slot_id(SlotKind kind, std::uint32_t index = 0) {
  return (static_cast<std::uint32_t>(kind) << 16) | (index & 0xffffu);
}

/// splitmix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t key(std::uint64_t seed, Stream stream, std::uint64_t epoch, std::uint32_t slot,
                            std::uint32_t node) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ static_cast<std::uint64_t>(stream));
  h = mix(h ^ epoch);
  h = mix(h ^ ((static_cast<std::uint64_t>(slot) << 32) | node));
  return h;
}

/// Uniform in [0, 1) with 53 random bits.
constexpr double uniform(std::uint64_t k) { return static_cast<double>(k >> 11) * 0x1.0p-53; }

struct Key {
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;

  double uniform(Stream stream, std::uint32_t slot, std::uint32_t node) const {
    return rng::uniform(key(seed, stream, epoch, slot, node));
  }
  bool bernoulli(double p, Stream stream, std::uint32_t slot, std::uint32_t node) const {
    return uniform(stream, slot, node) < p;
  }
  /// Sequential engine for bulk draws such as measurement noise.
  std::mt19937_64 engine(Stream stream) const { return std::mt19937_64(key(seed, stream, epoch, 0, 0)); }
};

}  // namespace wcb::rng
