#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace gsim {

/// SplitMix64 (Steele, Lea, Flood 2014).
///
/// State update: `state += 0x9E3779B97F4A7C15`, then the output is the
/// state mixed by
///
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     z =  z ^ (z >> 31)
///
/// Derived draws are fixed here as well so that replays are portable:
/// `uniform()` takes the top 53 bits, `below(n)` uses the high word of the
/// 128-bit product `next() * n`. No standard-library distributions are
/// involved anywhere in the project.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    __extension__ using u128 = unsigned __int128;
    const u128 wide = static_cast<u128>(next()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  /// Independent child stream, used to give sub-tasks their own generator.
  SplitMix64 fork() { return SplitMix64(next() ^ 0xD1B54A32D192ED03ULL); }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t state() const { return state_; }

private:
  std::uint64_t state_;
};

}  // namespace gsim
