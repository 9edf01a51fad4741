#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace iscore {

// Splittable deterministic generator: xoshiro256** seeded through splitmix64.
// Streams are derived from the root seed plus integer keys, never from the
// current state, so fork(a, b) yields the same stream no matter how many
// draws happened on the parent. All output is platform-independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) w = splitmix64(x);
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

  /// Uniform double in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), bound > 0. Rejection keeps it unbiased.
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
    const std::uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Index into a discrete distribution given by probabilities (need not be
  /// exactly normalized; the last bucket absorbs rounding slack).
  std::size_t discrete(std::span<const double> probs) {
    double u = next_double();
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      if (u < probs[i]) return i;
      u -= probs[i];
    }
    return probs.empty() ? 0 : probs.size() - 1;
  }

  /// Independent child stream keyed by (root seed, k1, k2).
  Rng fork(std::uint64_t k1, std::uint64_t k2 = 0) const {
    std::uint64_t x = key_;
    std::uint64_t h = splitmix64(x);
    x ^= k1 + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(x);
    x ^= k2 + 0xbf58476d1ce4e5b9ULL;
    h ^= splitmix64(x);
    return Rng(h);
  }

  std::uint64_t key() const { return key_; }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t key_ = 0;
};

}  // namespace iscore
