#pragma once

#include <cstdint>
#include <limits>

namespace rlvi {

/// Counter-based generator: the i-th output of a stream is a fixed mixing
/// function of (key, i), so any stream can be split into independent,
/// reproducible child streams. Mixing is the SplitMix64 finaliser.
///
/// Satisfies UniformRandomBitGenerator for use with <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint32_t kVersion = 1;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Child generator whose key depends on this generator's key and `stream`
  /// only, not on how many values have been drawn.
  CounterRng split(std::uint64_t stream) const;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  CounterRng(std::uint64_t key, std::uint64_t counter, bool /*raw*/) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for trial `index` of a Monte-Carlo run started from `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

}  // namespace rlvi
