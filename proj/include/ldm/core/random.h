#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ldm {

/// Derives an independent, reproducible seed for a named sub-stream
/// ("dataset", "mpc", "sweep", ...) from the run seed.
inline std::uint64_t SubstreamSeed(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed ^ h;  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Rng MakeRng(std::uint64_t seed, std::string_view stream) {
  return Rng(SubstreamSeed(seed, stream));
}

}  // namespace ldm
