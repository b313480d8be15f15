#pragma once

#include <cstdint>
#include <limits>

namespace bellphase::rng {

// SplitMix64 finaliser. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

private:
  std::uint64_t state_;
};

// Key of one independent substream. The three coordinates are folded one at a
// time through mix64, each preceded by a distinct odd multiplier so that
// (seed, tag, partition) permutations land on different keys:
//   k0 = mix64(seed)
//   k1 = mix64(k0 ^ (tag + 1) * 0xd1b54a32d192ed03)
//   key = mix64(k1 ^ (partition + 1) * 0x8cb92ba72f3d8dd7)
constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t tag,
                                      std::uint64_t partition) {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ ((tag + 1) * 0xd1b54a32d192ed03ULL));
  k = mix64(k ^ ((partition + 1) * 0x8cb92ba72f3d8dd7ULL));
  return k;
}

// xoshiro256** (Blackman and Vigna), state filled from SplitMix64 seeded with
// the substream key. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t key) {
    SplitMix64 sm(key);
    for (auto &w : s_) w = sm.next();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0, 1): midpoints of the 2^53 dyadic cells.
  constexpr double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4]{};
};

}  // namespace bellphase::rng
