#include "binfuse/fuse_filter.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "binfuse/random.hpp"
#include "oracles.hpp"

namespace binfuse {
namespace {

std::vector<std::uint64_t> random_keys(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::uint64_t> keys(n);
  for (auto& k : keys) k = rng();
  return keys;
}

FuseParams params(unsigned arity, unsigned bits = 8, std::uint64_t stream = 42) {
  FuseParams p;
  p.arity = arity;
  p.fingerprint_bits = bits;
  p.seed_stream = stream;
  return p;
}

double fpp(const FuseFilter& f, std::uint64_t queries, std::uint64_t seed) {
  // Random 64-bit probes; a collision with the small key sets used here has
  // probability below 2^-40 and is ignored.
  SplitMix64 rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < queries; ++i) hits += f.contains(rng());
  return static_cast<double>(hits) / static_cast<double>(queries);
}

// Expected values below were evaluated independently from the sizing
// formulas (floor exponents, ceil to whole segments) outside this code base.
TEST(ComputeLayout, ThreeWiseMillion) {
  const auto layout = compute_layout(1'000'000, 3);
  EXPECT_EQ(layout.segment_length, 8192u);
  EXPECT_EQ(raw_array_size(1'000'000, 3), 1'125'000u);
  EXPECT_EQ(layout.array_length, 1'130'496u);
  EXPECT_EQ(layout.segment_count(), 138u);
  EXPECT_EQ(layout.start_segment_count, 136u);
  EXPECT_TRUE(layout.valid());
}

TEST(ComputeLayout, FourWiseMillion) {
  const auto layout = compute_layout(1'000'000, 4);
  EXPECT_EQ(layout.segment_length, 4096u);
  EXPECT_EQ(raw_array_size(1'000'000, 4), 1'075'000u);
  EXPECT_EQ(layout.array_length, 1'077'248u);
  EXPECT_EQ(layout.start_segment_count, 260u);
}

TEST(ComputeLayout, OtherSizes) {
  struct Case {
    std::uint64_t n;
    unsigned arity;
    std::uint32_t segment, length, starts;
  };
  const Case cases[] = {
      {2, 3, 4, 12, 1},           {2, 4, 1, 13, 10},          {100, 3, 64, 192, 1},
      {100, 4, 8, 168, 18},       {10'000, 3, 512, 12800, 23}, {10'000, 4, 256, 12288, 45},
      {100'000, 3, 2048, 118784, 56}, {100'000, 4, 1024, 112640, 107},
      {10'000'000, 3, 32768, 11272192, 342}, {10'000'000, 4, 16384, 10764288, 654},
  };
  for (const auto& c : cases) {
    const auto layout = compute_layout(c.n, c.arity);
    EXPECT_EQ(layout.segment_length, c.segment) << c.n << "/" << c.arity;
    EXPECT_EQ(layout.array_length, c.length) << c.n << "/" << c.arity;
    EXPECT_EQ(layout.start_segment_count, c.starts) << c.n << "/" << c.arity;
  }
}

TEST(ComputeLayout, DegenerateSets) {
  const auto empty3 = compute_layout(0, 3);
  EXPECT_EQ(empty3.start_segment_count, 1u);
  EXPECT_EQ(empty3.array_length, 3 * empty3.segment_length);
  EXPECT_EQ(empty3.segment_length, 4u);
  EXPECT_EQ(compute_layout(1, 3), empty3);

  const auto empty4 = compute_layout(0, 4);
  EXPECT_EQ(empty4.start_segment_count, 1u);
  EXPECT_EQ(empty4.array_length, 4 * empty4.segment_length);
  EXPECT_TRUE(empty4.valid());
}

TEST(ComputeLayout, RejectsBadArity) {
  EXPECT_THROW(compute_layout(100, 2), ConfigurationError);
  EXPECT_THROW(compute_layout(100, 5), ConfigurationError);
}

TEST(ComputeLayout, MonotoneInSetSize) {
  for (unsigned arity : {3u, 4u}) {
    std::uint32_t previous = 0;
    for (int i = 0; i <= 4000; ++i) {
      const auto n = static_cast<std::uint64_t>(std::pow(10.0, 7.0 * i / 4000.0));
      const auto layout = compute_layout(n, arity);
      ASSERT_TRUE(layout.valid());
      ASSERT_GE(layout.array_length, previous) << "n=" << n << " arity=" << arity;
      ASSERT_GE(layout.array_length, raw_array_size(n, arity));
      ASSERT_LE(layout.segment_length, kMaxSegmentLength);
      previous = layout.array_length;
    }
  }
}

TEST(ComputeLayout, AsymptoticSpace) {
  for (std::uint64_t n : {1'000'000ull, 3'000'000ull, 10'000'000ull, 100'000'000ull, 1'000'000'000ull}) {
    EXPECT_LE(compute_layout(n, 3).array_length / double(n), 1.135) << n;
    EXPECT_LE(compute_layout(n, 4).array_length / double(n), 1.085) << n;
  }
}

TEST(SegmentRatio, Examples) {
  EXPECT_DOUBLE_EQ(segment_ratio(compute_layout(1'000'000, 3)), 138.0);
  EXPECT_DOUBLE_EQ(segment_ratio(compute_layout(1'000'000, 4)), 263.0);
  EXPECT_DOUBLE_EQ(segment_ratio(compute_layout(0, 3)), 3.0);
}

TEST(FuseFilter, TinySet) {
  const std::vector<std::uint64_t> keys = {1, 2, 3};
  for (unsigned arity : {3u, 4u}) {
    const auto built = FuseFilter::construct(keys, params(arity));
    EXPECT_TRUE(built.report.success);
    EXPECT_GE(built.report.attempts, 1u);
    EXPECT_EQ(built.report.final_seed, built.filter.seed());
    for (auto k : keys) EXPECT_TRUE(built.filter.contains(k));
  }
}

TEST(FuseFilter, NoFalseNegativesAndXorInvariant) {
  for (unsigned arity : {3u, 4u}) {
    for (unsigned bits : {8u, 16u}) {
      for (std::size_t n : {1u, 2u, 7u, 100u, 1000u, 10'000u, 100'000u}) {
        const auto keys = random_keys(n, n * 31 + arity);
        const auto built = FuseFilter::construct(keys, params(arity, bits, n));
        const auto& f = built.filter;
        for (auto k : keys) ASSERT_TRUE(f.contains(k)) << n;
        EXPECT_TRUE(testing::xor_invariant_holds(f, keys, [&](HashValue h) {
          return testing::naive_fuse_locations(h.value, f.layout());
        }));
      }
    }
  }
}

TEST(FuseFilter, MillionKeysNoFalseNegatives) {
  const auto keys = random_keys(1'000'000, 99);
  for (unsigned arity : {3u, 4u}) {
    const auto built = FuseFilter::construct(keys, params(arity));
    std::size_t missing = 0;
    for (auto k : keys) missing += !built.filter.contains(k);
    EXPECT_EQ(missing, 0u);
  }
}

TEST(FuseFilter, SequentialKeys) {
  std::vector<std::uint64_t> keys(200'000);
  for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = i + 1;
  const auto built = FuseFilter::construct(keys, params(3));
  for (auto k : keys) ASSERT_TRUE(built.filter.contains(k));
}

TEST(FuseFilter, FalsePositiveRateEightBits) {
  const auto keys = random_keys(1'000'000, 5);
  for (unsigned arity : {3u, 4u}) {
    const auto built = FuseFilter::construct(keys, params(arity));
    const double rate = fpp(built.filter, 10'000'000, 77 + arity);
    EXPECT_NEAR(rate, 1.0 / 256, 3 * testing::binomial_sigma(1.0 / 256, 1e7));
  }
}

TEST(FuseFilter, FalsePositiveRateSixteenBits) {
  const auto keys = random_keys(1'000'000, 6);
  const auto built = FuseFilter::construct(keys, params(3, 16));
  const double rate = fpp(built.filter, 10'000'000, 78);
  EXPECT_NEAR(rate, 1.0 / 65536, 3 * testing::binomial_sigma(1.0 / 65536, 1e7));
}

TEST(FuseFilter, EmptySetAnswersLikeZeroFingerprint) {
  const auto built = FuseFilter::construct({}, params(3));
  EXPECT_EQ(built.report.attempts, 1u);
  const auto& f = built.filter;
  SplitMix64 rng(3);
  for (int i = 0; i < 100000; ++i) {
    const std::uint64_t key = rng();
    EXPECT_EQ(f.contains(key), fingerprint(mix64(key, f.seed()), 8) == 0);
  }
}

TEST(FuseFilter, DuplicateKeysReportedDistinctly) {
  std::vector<std::uint64_t> keys = random_keys(1000, 8);
  keys.push_back(keys[17]);
  EXPECT_THROW(FuseFilter::construct(keys, params(3)), DuplicateKeyError);
  auto p = params(4);
  p.max_attempts = 3;
  EXPECT_THROW(FuseFilter::construct(keys, p), DuplicateKeyError);
}

TEST(FuseFilter, ExhaustedAttemptsRaiseConstructionError) {
  // Find a stream whose first seed does not peel, then allow one attempt.
  const auto keys = random_keys(100, 9);
  for (std::uint64_t stream = 0; stream < 10000; ++stream) {
    const Seed seed{SplitMix64(stream)()};
    if (!peel_fuse(keys, compute_layout(keys.size(), 4), seed).success) {
      auto p = params(4, 8, stream);
      p.max_attempts = 1;
      try {
        FuseFilter::construct(keys, p);
        FAIL() << "expected ConstructionError";
      } catch (const DuplicateKeyError&) {
        FAIL() << "distinct keys reported as duplicates";
      } catch (const ConstructionError& e) {
        EXPECT_EQ(e.attempts(), 1u);
      }
      return;
    }
  }
  FAIL() << "no failing seed found";
}

TEST(FuseFilter, RejectsBadParameters) {
  const std::vector<std::uint64_t> keys = {1, 2, 3};
  EXPECT_THROW(FuseFilter::construct(keys, params(3, 12)), ConfigurationError);
  EXPECT_THROW(FuseFilter::construct(keys, params(5)), ConfigurationError);
  auto p = params(3);
  p.max_attempts = 0;
  EXPECT_THROW(FuseFilter::construct(keys, p), ConfigurationError);
}

TEST(FuseFilter, SameSeedStreamSameFilter) {
  const auto keys = random_keys(5000, 10);
  const auto a = FuseFilter::construct(keys, params(3, 8, 1234));
  const auto b = FuseFilter::construct(keys, params(3, 8, 1234));
  EXPECT_EQ(a.filter, b.filter);
  const auto c = FuseFilter::construct(keys, params(3, 8, 4321));
  EXPECT_NE(a.filter.seed(), c.filter.seed());
}

TEST(FuseFilter, FirstAttemptFailureRateIsLow) {
  for (unsigned arity : {3u, 4u}) {
    SplitMix64 rng(arity);
    int retried = 0;
    constexpr int kRuns = 200;
    for (int i = 0; i < kRuns; ++i) {
      const auto keys = random_keys(10'000, rng());
      retried += FuseFilter::construct(keys, params(arity, 8, rng())).report.attempts > 1;
    }
    EXPECT_LT(retried, kRuns * 6 / 100) << "arity " << arity;
  }
}

TEST(BitsPerKey, Examples) {
  const FuseFilter f3(Seed{1}, compute_layout(1'000'000, 3),
                      FingerprintTable(8, compute_layout(1'000'000, 3).array_length));
  EXPECT_NEAR(bits_per_key(f3, 1'000'000), 9.04, 0.005);
  const FuseFilter f4(Seed{1}, compute_layout(1'000'000, 4),
                      FingerprintTable(8, compute_layout(1'000'000, 4).array_length));
  EXPECT_NEAR(bits_per_key(f4, 1'000'000), 8.62, 0.005);
  const FuseFilter f16(Seed{1}, compute_layout(1'000'000, 3),
                       FingerprintTable(16, compute_layout(1'000'000, 3).array_length));
  EXPECT_NEAR(bits_per_key(f16, 1'000'000), 18.09, 0.005);
  EXPECT_THROW(bits_per_key(f3, 0), UndefinedRatioError);
}

TEST(FuseFilter, AdoptingPartsValidates) {
  auto layout = compute_layout(1000, 3);
  EXPECT_THROW(FuseFilter(Seed{1}, layout, FingerprintTable(8, layout.array_length - 1)),
               CorruptionError);
  layout.segment_length = 100;
  EXPECT_THROW(FuseFilter(Seed{1}, layout, FingerprintTable(8, layout.array_length)),
               CorruptionError);
}

}  // namespace
}  // namespace binfuse
