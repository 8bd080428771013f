#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "icy/rng.hpp"

namespace icy {
namespace {

TEST(CounterRng, SameSeedAndStreamGiveSameSequence) {
  CounterRng a(123, 7);
  CounterRng b(123, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(CounterRng, OutputIsAFunctionOfSeedStreamAndCounter) {
  // Independent oracle of the documented construction.
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  EXPECT_EQ(mix64(0x1234), mix(0x1234));
  CounterRng rng(99, 3);
  const std::uint64_t key = rng.key();
  for (std::uint64_t i = 0; i < 16; ++i) {
    EXPECT_EQ(rng.next_u64(), mix(key + (i + 1) * 0x9E3779B97F4A7C15ULL));
  }
}

TEST(CounterRng, DifferentStreamsDiffer) {
  CounterRng a(5, 0);
  CounterRng b(5, 1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next_u64() == b.next_u64();
  EXPECT_EQ(equal, 0);
}

TEST(CounterRng, UniformIsInUnitIntervalWithCorrectMoments) {
  CounterRng rng(1);
  const int n = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sum_sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(CounterRng, BelowIsUniformOverSmallRange) {
  CounterRng rng(2);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);  // 99.9th percentile, 6 degrees of freedom
  EXPECT_THROW(rng.below(0), std::invalid_argument);
}

TEST(CounterRng, SplitIsDeterministicAndDistinct) {
  const CounterRng parent(77);
  CounterRng a = parent.split(1);
  CounterRng b = parent.split(1);
  CounterRng c = parent.split(2);
  const auto va = a.next_u64();
  EXPECT_EQ(va, b.next_u64());
  EXPECT_NE(va, c.next_u64());
}

TEST(HashWords, OrderSensitive) {
  EXPECT_NE(hash_words({1, 2}), hash_words({2, 1}));
  EXPECT_EQ(hash_words({1, 2, 3}), hash_words({1, 2, 3}));
}

TEST(SamplePoisson, MeanAndVarianceMatch) {
  for (double mean : {0.5, 4.0, 100.0, 2500.0}) {
    CounterRng rng(static_cast<std::uint64_t>(mean * 10));
    const int n = 4000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(sample_poisson(rng, mean));
      sum += k;
      sum_sq += k * k;
    }
    const double m = sum / n;
    const double var = sum_sq / n - m * m;
    EXPECT_NEAR(m, mean, 5.0 * std::sqrt(mean / n)) << mean;
    EXPECT_NEAR(var / mean, 1.0, 0.12) << mean;
  }
}

TEST(SamplePoisson, ZeroMeanGivesZero) {
  CounterRng rng(3);
  EXPECT_EQ(sample_poisson(rng, 0.0), 0u);
}

}  // namespace
}  // namespace icy
