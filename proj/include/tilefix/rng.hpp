#pragma once

#include <cstdint>
#include <vector>

namespace tilefix {

// xoshiro256** seeded through splitmix64. Self-contained so that seeded runs
// reproduce bit-for-bit across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      word = splitmix64(x);
    }
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

  // Uniform in [0, n). Rejection sampling keeps the draw unbiased.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) {
      v = next_u64();
    }
    return v % n;
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // True with probability p; draws exactly one variate either way.
  bool chance(double p) { return uniform_real() <= p; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Derives an unrelated stream, e.g. one per test-set example.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t x = seed ^ (tag * 0x9e3779b97f4a7c15ULL);
    return splitmix64(x);
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
};

}  // namespace tilefix
