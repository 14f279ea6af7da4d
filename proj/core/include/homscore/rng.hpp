#pragma once

#include <cstdint>
#include <random>

namespace homscore {

// splitmix64: fast 64-bit mixer, used to derive independent substreams
// from a (seed, index...) key so that parallel work keyed by index is
// schedule-independent.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
  s = splitmix64(s ^ splitmix64(a + 0x3c6ef372fe94f82bULL));
  s = splitmix64(s ^ splitmix64(b + 0xbb67ae8584caa73bULL));
  return s;
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return std::mt19937_64(substream_seed(seed, a, b));
}

}  // namespace homscore
