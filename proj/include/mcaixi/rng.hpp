#pragma once

#include <cstdint>
#include <random>

namespace mcaixi {

// One SplitMix64 step; used to whiten seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent generator from a master seed and a stream tag.
// Every randomness consumer gets its own tag, so changing how much one
// consumer draws never perturbs the others.
inline std::mt19937_64 derive_rng(std::uint64_t master, std::uint64_t tag) {
  std::uint64_t s = master ^ (tag * 0xd1342543de82ef95ULL);
  std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
  return std::mt19937_64(seq);
}

inline double uniform01(std::mt19937_64& rng) {
  return std::generate_canonical<double, 53>(rng);
}

inline bool bernoulli(std::mt19937_64& rng, double p_one) {
  return uniform01(rng) < p_one;
}

// Uniform draw from [0, n).
inline int uniform_int(std::mt19937_64& rng, int n) {
  return static_cast<int>(std::uniform_int_distribution<unsigned>(0, static_cast<unsigned>(n - 1))(rng));
}

}  // namespace mcaixi
