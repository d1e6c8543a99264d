#pragma once

// Counter-based randomness. Every random variable of the model is a pure
// function of (seed, stream, time, site, particle index), so any number of
// workers can regenerate the same field in any order, and two processes run on
// the same seed share every uniform and every displacement.

#include <cstdint>

#include "brwre/site.hpp"

namespace brwre::rng {

enum class Stream : std::uint64_t {
  environment = 0x656e7669726f6eULL,   // component selection of q_{t,x}
  offspring = 0x6f6666737072ULL,       // U_{t,x,k}
  displacement = 0x646973706cULL,      // D_{t,x,k}
};

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output function (bijective on 64-bit words).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of the (t, x) cell of a stream.
constexpr std::uint64_t cell_key(std::uint64_t seed, Stream stream, std::uint64_t t,
                                 const Site& x, int d) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(stream));
  h = mix64(h ^ t);
  for (int i = 0; i < d; ++i) h = mix64(h ^ static_cast<std::uint32_t>(x[i]));
  return h;
}

/// k-th word of the cell whose key is `key`; the words k = 0, 1, 2, ... form
/// a SplitMix64 sequence started at `key`.
constexpr std::uint64_t draw(std::uint64_t key, std::uint64_t k) noexcept {
  return mix64(key + k * kGolden);
}

/// Uniform on [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform on {0, ..., n-1} (multiply-shift; bias below 2^-32 for small n).
constexpr std::uint32_t to_below(std::uint64_t bits, std::uint32_t n) noexcept {
  return static_cast<std::uint32_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

/// Named experiment streams of the replica seed ladder.
enum class Tag : std::uint64_t {
  survival = 1,
  sweep = 2,
  fkg = 3,
  block = 4,
  orthant = 5,
  diagnostics = 6,
  simulate = 7,
};

struct ReplicaSeeds {
  std::uint64_t environment;
  std::uint64_t dynamics;
};

/// Seed ladder (master, tag, replica) -> independent environment and dynamics seeds.
constexpr ReplicaSeeds replica_seeds(std::uint64_t master, Tag tag, std::uint64_t replica) noexcept {
  const std::uint64_t base = mix64(mix64(master) ^ mix64(static_cast<std::uint64_t>(tag)));
  const std::uint64_t r = mix64(base ^ mix64(replica));
  return {mix64(r ^ 0x1ULL), mix64(r ^ 0x2ULL)};
}

}  // namespace brwre::rng
