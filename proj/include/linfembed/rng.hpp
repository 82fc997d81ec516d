#pragma once

#include <cstdint>

namespace linfembed {

// SplitMix64. All randomized pieces (generators, operator sampling) draw
// from this fixed stream so outputs are reproducible across platforms and
// standard libraries.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound) via fixed-point multiply; bound > 0.
  uint64_t below(uint64_t bound) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // 53-bit uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  SplitMix64 g(a ^ (0x632be59bd9b4e019ULL + (b << 1)));
  g.next();
  return g.next() ^ b;
}

}  // namespace linfembed
