#pragma once

#include <cstdint>
#include <random>

namespace zeno::rng {

// splitmix64: the standard 64-bit finalizer-based generator step.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic substream seed: fold (seed, a, b) through splitmix64 so that
// replica/grid-point streams are decorrelated but reproducible.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t s = seed;
  std::uint64_t z = splitmix64(s);
  s = z ^ (a * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL);
  z = splitmix64(s);
  s = z ^ (b * 0xc2b2ae3d27d4eb4fULL + 0x452821e638d01377ULL);
  return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline int draw_binomial(std::mt19937_64& eng, int trials, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<int> dist(trials, p);
  return dist(eng);
}

}  // namespace zeno::rng
