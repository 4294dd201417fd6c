#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace chainml {

// splitmix64; used to expand a 64-bit seed into xoshiro state.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : x_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (x_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t x_;
};

// xoshiro256** seeded via splitmix64. Every random draw in the simulator
// flows through this generator so runs are reproducible across platforms.
// State words are filled from splitmix64 in order s[0], s[1], s[2], s[3];
// all 64-bit outputs are consumed as native unsigned integers (no byte
// reinterpretation anywhere).
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
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

  // next() mod n. The modulo bias is irrelevant here; what matters is that
  // every implementation draws the same values.
  std::uint64_t bounded(std::uint64_t n) { return next() % n; }

  // First k entries of a partial Fisher-Yates shuffle of 0..n-1.
  std::vector<std::uint32_t> sample_distinct(std::uint32_t k, std::uint32_t n) {
    std::vector<std::uint32_t> pool(n);
    for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
    for (std::uint32_t i = 0; i < k; ++i) {
      const std::uint32_t j = i + static_cast<std::uint32_t>(bounded(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace chainml
