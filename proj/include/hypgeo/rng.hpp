#pragma once
#include <cstdint>
#include <random>

namespace hypgeo {

// splitmix64: tiny, well-mixed 64-bit hash used to derive independent
// per-row seeds from (run seed, row index). Deterministic everywhere.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t row) {
  return splitmix64(seed ^ splitmix64(row + 1));
}

// Uniform double in [0,1). std::mt19937_64's output sequence is fully
// specified by the standard; only the distributions are implementation
// defined, so we map to doubles ourselves to keep runs byte-reproducible.
inline double unif01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double unif(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * unif01(g);
}

}  // namespace hypgeo
