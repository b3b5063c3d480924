#pragma once
// Deterministic seeding. Monte Carlo components derive independent
// substreams from (master seed, block index), so results never depend on
// how work is split across threads.
#include <cstdint>
#include <random>

namespace molcomm {

/// splitmix64 finalizer; used to decorrelate seed material.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Engine for substream `index` of master `seed`.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64{mix64(seed ^ mix64(index + 0x51ed2701a9d4d3c1ull))};
}

}  // namespace molcomm
