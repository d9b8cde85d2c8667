#pragma once

#include <cstdint>
#include <limits>

namespace warmstart {

/// Counter-based generator built on the SplitMix64 output function.
///
/// The n-th draw of a stream with key K is mix64(K + n * 0x9E3779B97F4A7C15),
/// so any draw can be recomputed from (key, n) alone and the output is the
/// same on every platform. `split(tag)` derives an independent child stream;
/// generators use one child per logical component (cluster layout, day
/// sampling, noise) so adding draws to one component never shifts another.
/// Doubles are taken from the top 53 bits; no std:: distributions are used.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix64(seed ^ 0x6A09E667F3BCC909ULL)) {}

  static constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  CounterRng split(std::uint64_t tag) const {
    CounterRng child(0);
    child.key_ = mix64(key_ ^ mix64(tag + kGamma));
    return child;
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform in [0, n), n > 0, by rejection (unbiased).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace warmstart
