#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace rnr {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator for sub-stream `stream` of a base seed. Streams with
/// distinct tags never share state, which keeps per-task sampling schedules
/// identical across training modes.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

/// Uniform draw from [0, n). Modulo reduction on a 64-bit draw; the bias is
/// below 2^-32 for any n that fits in memory.
inline std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

/// Fisher-Yates shuffle of 0..n-1, independent of std::shuffle internals.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[bounded(rng, i)]);
  }
  return idx;
}

}  // namespace rnr
