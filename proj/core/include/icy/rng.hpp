#pragma once

#include <cstdint>
#include <initializer_list>

namespace icy {

/// Counter-based generator built on the SplitMix64 finalizer.
///
/// The i-th output of a stream is mix64(key + (i + 1) * 0x9E3779B97F4A7C15),
/// where key = mix64(seed ^ mix64(stream)). Outputs depend only on
/// (seed, stream, i), so sequences are identical on every platform and any
/// stream can be derived without touching shared state. split() derives an
/// independent child stream from the current key.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  CounterRng split(std::uint64_t stream) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

/// Order-sensitive combination of several words into one 64-bit hash.
std::uint64_t hash_words(std::initializer_list<std::uint64_t> words);

/// Maps a 64-bit hash to a double in [0, 1).
inline double hash_to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Poisson-distributed count. Large means are split into chunks so the
/// sequential-search sampler stays numerically safe.
std::uint64_t sample_poisson(CounterRng& rng, double mean);

}  // namespace icy
