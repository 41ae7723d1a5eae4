#pragma once

// Counter-based SplitMix64 streams. A stream is fully determined by a key
// derived from the master seed and a path of indices, so trial (f, t) draws
// the same numbers no matter which thread runs it or in which order.

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace bacc {

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Key for the substream at `path` below `seed`.
inline constexpr std::uint64_t substream_key(std::uint64_t seed,
                                             std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t k = mix64(seed + kGolden);
  for (std::uint64_t p : path) k = mix64(k ^ mix64(p + kGolden));
  return k;
}

/// Output i is mix64(key + (i + 1) * golden). Satisfies
/// UniformRandomBitGenerator.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}
  CounterStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept
      : key_(substream_key(seed, path)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return mix64(key_ + (++counter_) * kGolden); }

  /// Uniform on [lo, hi) with 53 random bits.
  constexpr double uniform(double lo, double hi) noexcept {
    const double u = static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  /// Uniform integer in [0, n) by rejection; n > 0.
  constexpr std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x = (*this)();
    while (x >= limit) x = (*this)();
    return x % n;
  }

  [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bacc
