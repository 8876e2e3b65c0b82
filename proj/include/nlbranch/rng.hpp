#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace nlbranch {

/// SplitMix64 finaliser; used to derive independent substream keys.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Key of substream `index` under `tag`, a pure function of its inputs so
/// realization i sees the same randomness whatever thread runs it.
constexpr std::uint64_t substream_key(std::uint64_t tag, std::uint64_t index) {
  return splitmix64(splitmix64(tag) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// xoshiro256++ generator seeded from (master seed, substream key).
///
/// Satisfies UniformRandomBitGenerator so std distributions can draw from it.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t master_seed, std::uint64_t stream) {
    std::uint64_t z = splitmix64(master_seed) ^ splitmix64(stream ^ 0xd1b54a32d192ed03ULL);
    for (auto& w : s_) {
      z += 0x9e3779b97f4a7c15ULL;
      w = splitmix64(z);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double normal() { return normal_(*this); }

  /// Unit-mean exponential.
  double exponential() { return -std::log1p(-uniform()); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace nlbranch
