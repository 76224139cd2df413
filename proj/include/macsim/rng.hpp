#pragma once

#include <cstdint>

#include "macsim/time.hpp"

namespace macsim {

// xoshiro256** seeded through splitmix64. Implemented by the book rather
// than through <random> distributions so that streams are bit-identical
// across standard libraries (the determinism contract covers traces and
// CSV output byte for byte).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform over [0, bound), bound > 0. Rejection sampling keeps it unbiased.
  std::uint64_t uniform(std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  int uniform_int(int bound) { return static_cast<int>(uniform(static_cast<std::uint64_t>(bound))); }

  Tick uniform_tick(Tick bound) { return static_cast<Tick>(uniform(static_cast<std::uint64_t>(bound))); }

  // 53-bit mantissa uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Derives independent stream seeds (per replication, per node, ...).
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2));
    x = splitmix64(x);
    return x ^ splitmix64(x);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t splitmix64(std::uint64_t&& x) {
    std::uint64_t v = x;
    return splitmix64(v);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

}  // namespace macsim
