#pragma once

#include <cstdint>
#include <random>

#include "dyadic/signal.hpp"

namespace dyadic {

using Rng = std::mt19937_64;

/// Independent child seed for stream `stream` of a parent seed (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Standard normal cell values.
GridSignal random_signal(const Shape& shape, Rng& rng);

/// Standard normal coefficients; with pure_only, mean-bearing slots stay zero.
HaarExpansion random_expansion(const Shape& shape, Rng& rng, bool pure_only = false);

/// Pure coefficients f_R = g_R * |R|^(1/2): bmo-scale content at every generation.
HaarExpansion random_bmo_expansion(const Shape& shape, Rng& rng);

}  // namespace dyadic
