#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace rodian {

// splitmix64; used to expand a 64-bit seed into generator state.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ 1.0 (Blackman & Vigna), seeded through splitmix64.
///
/// All derived draws (uniform, Box-Muller normal, bounded integers) are
/// built on fixed integer arithmetic, so a given seed reproduces the same
/// sequence on every platform. Each instance owns its state; concurrent
/// use requires one instance per thread.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  // Substream `stream` of the same base seed; stream 0 is the plain seed.
  Xoshiro256pp(std::uint64_t seed, std::uint64_t stream)
      : Xoshiro256pp(seed + 0x9e3779b97f4a7c15ULL * stream) {}

  std::uint64_t operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  /// Normal draw via Box-Muller, one independent value per call.
  double normal(double mean, double sigma) {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  /// Integer in [0, bound) by multiply-shift; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }

 private:
  static constexpr double two_pi = 6.283185307179586476925286766559;
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

/// Fisher-Yates shuffle driven by the seeded generator above.
template <typename T>
void shuffle(std::vector<T>& values, Xoshiro256pp& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[rng.below(i)]);
  }
}

}  // namespace rodian
