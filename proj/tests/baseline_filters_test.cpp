#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "binfuse/bloom_filter.hpp"
#include "binfuse/random.hpp"
#include "binfuse/xor_filter.hpp"
#include "oracles.hpp"

namespace binfuse {
namespace {

std::vector<std::uint64_t> random_keys(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::uint64_t> keys(n);
  for (auto& k : keys) k = rng();
  return keys;
}

template <class Filter>
double positive_rate(const Filter& f, std::uint64_t queries, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < queries; ++i) hits += f.contains(rng());
  return static_cast<double>(hits) / static_cast<double>(queries);
}

XorParams xor_params(unsigned bits = 8, std::uint64_t stream = 1) {
  XorParams p;
  p.fingerprint_bits = bits;
  p.seed_stream = stream;
  return p;
}

TEST(XorFilter, ArrayLength) {
  EXPECT_EQ(xor_array_length(0), 33u);
  EXPECT_EQ(xor_array_length(1'000'000), 1'230'033u);
  for (std::uint64_t n = 0; n < 5000; n += 7) EXPECT_EQ(xor_array_length(n) % 3, 0u);
}

TEST(XorFilter, TinySet) {
  const std::vector<std::uint64_t> keys = {1, 2, 3};
  const auto built = XorFilter::construct(keys, xor_params());
  for (auto k : keys) EXPECT_TRUE(built.filter.contains(k));
}

TEST(XorFilter, NoFalseNegativesAndXorInvariant) {
  for (unsigned bits : {8u, 16u}) {
    for (std::size_t n : {0u, 1u, 100u, 10'000u, 200'000u}) {
      const auto keys = random_keys(n, n + bits);
      const auto f = XorFilter::construct(keys, xor_params(bits, n)).filter;
      for (auto k : keys) ASSERT_TRUE(f.contains(k));
      EXPECT_TRUE(testing::xor_invariant_holds(f, keys, [&](HashValue h) {
        return xor_locations(h, f.block_length());
      }));
    }
  }
}

TEST(XorFilter, BitsPerKeyAtMillion) {
  const auto keys = random_keys(1'000'000, 3);
  const auto f = XorFilter::construct(keys, xor_params()).filter;
  EXPECT_NEAR(bits_per_key(f, keys.size()), 9.84, 0.005);
  EXPECT_THROW(bits_per_key(f, 0), UndefinedRatioError);
}

TEST(XorFilter, FirstAttemptSuccessRate) {
  SplitMix64 rng(4);
  int first = 0;
  for (int i = 0; i < 200; ++i) {
    const auto keys = random_keys(10'000, rng());
    first += XorFilter::construct(keys, xor_params(8, rng())).report.attempts == 1;
  }
  EXPECT_GE(first, 170);
}

TEST(XorFilter, FalsePositiveRates) {
  const auto keys = random_keys(1'000'000, 5);
  const auto f8 = XorFilter::construct(keys, xor_params(8)).filter;
  EXPECT_NEAR(positive_rate(f8, 10'000'000, 6), 1.0 / 256, 0.0002);
  const auto f16 = XorFilter::construct(keys, xor_params(16)).filter;
  EXPECT_NEAR(positive_rate(f16, 10'000'000, 7), 1.0 / 65536,
              3 * testing::binomial_sigma(1.0 / 65536, 1e7));
}

TEST(XorFilter, DuplicatesAndBadWidth) {
  std::vector<std::uint64_t> keys = random_keys(500, 8);
  keys.push_back(keys.front());
  EXPECT_THROW(XorFilter::construct(keys, xor_params()), DuplicateKeyError);
  EXPECT_THROW(XorFilter::construct(random_keys(5, 1), xor_params(4)), ConfigurationError);
}

TEST(Bloom, OptimalHashCount) {
  EXPECT_EQ(bloom_optimal_hash_count(12), 8u);
  EXPECT_EQ(bloom_optimal_hash_count(16), 11u);
  EXPECT_EQ(bloom_optimal_hash_count(1), 1u);
  EXPECT_EQ(bloom_optimal_hash_count(0.1), 1u);
  EXPECT_THROW(bloom_optimal_hash_count(0), ConfigurationError);
}

TEST(Bloom, SizingRoundsToWords) {
  const BloomFilter f(1000, 12, 8, Seed{1});
  EXPECT_EQ(f.bit_count(), 12032u);
  EXPECT_EQ(BloomFilter(0, 12, 8, Seed{1}).bit_count(), 64u);
  EXPECT_THROW(BloomFilter(10, 12, 0, Seed{1}), ConfigurationError);
  EXPECT_THROW(BloomFilter(10, -1, 3, Seed{1}), ConfigurationError);
}

TEST(Bloom, AddedKeysContained) {
  const auto keys = random_keys(100'000, 9);
  BloomFilter single(keys.size(), 12, 8, Seed{5});
  for (auto k : keys) single.add(k);
  BloomFilter batched(keys.size(), 12, 8, Seed{5});
  batched.add_all(keys);
  EXPECT_EQ(single, batched);
  for (auto k : keys) ASSERT_TRUE(batched.contains(k));
}

TEST(Bloom, FalsePositiveRateMatchesFormula) {
  struct Case {
    double bits;
    unsigned hashes;
    double tolerance;
  };
  const auto keys = random_keys(1'000'000, 10);
  for (const Case c : {Case{12, 8, 0.10}, Case{16, 11, 0.15}}) {
    BloomFilter f(keys.size(), c.bits, c.hashes, Seed{11});
    f.add_all(keys);
    const double expected = testing::bloom_fpp_formula(c.bits, c.hashes);
    EXPECT_NEAR(positive_rate(f, 10'000'000, 12), expected, c.tolerance * expected) << c.bits;
  }
}

TEST(Bloom, PopulationMatchesOccupancyFormula) {
  const auto keys = random_keys(1'000'000, 13);
  BloomFilter f(keys.size(), 12, 8, Seed{14});
  f.add_all(keys);
  const double expected = testing::bloom_expected_population(
      static_cast<double>(f.bit_count()), static_cast<double>(keys.size()), 8);
  EXPECT_NEAR(static_cast<double>(f.population()), expected, 0.01 * expected);
  EXPECT_NEAR(bits_per_key(f, keys.size()), 12.0, 0.001);
}

}  // namespace
}  // namespace binfuse
