#pragma once

// Benchmark harness: datasets, query sets, timing and report output.
// Everything here is single-threaded.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "binfuse/filter.hpp"

namespace binfuse::bench {

enum class KeyMode { random, sequential };

struct BenchConfig {
  FilterKind kind = FilterKind::fuse3;
  std::uint64_t n = 1'000'000;
  unsigned fingerprint_bits = 8;  // fuse and xor
  double bloom_bits_per_key = 12;
  std::optional<unsigned> bloom_hash_count;  // unset: optimal for the bits per key
  std::uint64_t query_count = 10'000'000;
  double in_set_fraction = 0.25;
  unsigned repetitions = 3;
  KeyMode key_mode = KeyMode::random;
  std::uint64_t rng_seed = 0x5eed;

  /// Throws ConfigurationError: query_count >= 1, repetitions odd,
  /// in_set_fraction in [0, 1], supported widths.
  void validate() const;
  /// Fingerprint bits, or Bloom bits per key.
  double precision() const noexcept;
};

struct BenchReport {
  FilterKind kind = FilterKind::fuse3;
  std::uint64_t n = 0;
  double precision = 0;
  double construction_ns_per_key = 0;
  double query_ns_per_key = 0;
  double measured_fpp = 0;
  double bits_per_key = 0;
  unsigned attempts = 0;
  std::uint64_t matches = 0;
};

/// n distinct keys. Random mode draws from SplitMix64(seed) and redraws
/// collisions; sequential mode yields 1..n.
std::vector<std::uint64_t> generate_keys(std::uint64_t n, KeyMode mode, std::uint64_t seed);

/// Sorted copy of a key set, for rejecting accidental members.
class MemberIndex {
 public:
  explicit MemberIndex(std::span<const std::uint64_t> keys);
  bool contains(std::uint64_t key) const noexcept;

 private:
  std::vector<std::uint64_t> sorted_;
};

struct QuerySet {
  std::vector<std::uint64_t> keys;
  std::vector<bool> is_member;
  std::uint64_t member_count = 0;
};

/// floor(in_set_fraction * size) members drawn with replacement from `keys`,
/// the rest uniform 64-bit non-members, shuffled together.
QuerySet generate_query_set(std::span<const std::uint64_t> keys, std::uint64_t size,
                            double in_set_fraction, std::uint64_t seed);

struct BuiltFilter {
  AnyFilter filter;
  unsigned attempts = 1;
};

BuiltFilter build_filter(const BenchConfig& config, std::span<const std::uint64_t> keys,
                         std::optional<std::uint64_t> seed_stream = std::nullopt);

/// Repeats construction until at least `min_seconds` of wall time have
/// accumulated, averages, and reports the median over config.repetitions
/// runs, per key.
double time_construction(const BenchConfig& config, std::span<const std::uint64_t> keys,
                         double min_seconds = 0.1);
double time_construction(const BenchConfig& config);

struct QueryTiming {
  double ns_per_key = 0;
  std::uint64_t matches = 0;
};

/// One untimed warm-up pass, then the median of `repetitions` timed passes.
/// Membership calls go through a non-inlined function.
QueryTiming time_queries(const AnyFilter& filter, std::span<const std::uint64_t> queries,
                         unsigned repetitions = 3);

/// Positive rate over `non_member_count` random keys absent from `members`.
/// Requires at least 10^6 queries.
double measure_fpp(const AnyFilter& filter, std::span<const std::uint64_t> members,
                   std::uint64_t non_member_count, std::uint64_t seed);

/// Positive rate over the non-member part of a query set.
double query_set_fpp(const AnyFilter& filter, const QuerySet& queries);

/// Full measurement for one configuration.
BenchReport run_bench(const BenchConfig& config);

enum class TheoryKind { bloom, xor3, xor_plus, fuse3, fuse4, lower_bound };

/// Bits per key needed for false-positive probability epsilon in (0, 1).
double theoretical_space(TheoryKind kind, double epsilon);
/// By name: bloom, xor, xor+, fuse3, fuse4, lower-bound. Throws
/// ConfigurationError for an unknown name.
double theoretical_space(std::string_view kind, double epsilon);
std::string_view to_string(TheoryKind kind) noexcept;
inline constexpr TheoryKind kTheoryKinds[] = {TheoryKind::bloom,  TheoryKind::xor3,
                                             TheoryKind::xor_plus, TheoryKind::fuse3,
                                             TheoryKind::fuse4,  TheoryKind::lower_bound};

/// Column order of the CSV report.
inline constexpr std::string_view kCsvHeader =
    "filter,n,precision,construction_ns_per_key,query_ns_per_key,measured_fpp,bits_per_key,"
    "attempts,matches";

/// Writes the header and one row per report, sorted by (filter, n, precision).
void emit_report(std::span<const BenchReport> reports, std::ostream& out);
void emit_report(std::span<const BenchReport> reports, const std::filesystem::path& path);

/// gnuplot-style data files in `dir`, one per figure: construction_time.dat,
/// query_time.dat, bits_per_key.dat, false_positive_rate.dat. Each holds
/// an `n` column followed by one column per filter configuration.
void write_figure_data(std::span<const BenchReport> reports, const std::filesystem::path& dir);

/// Theory table for epsilon = 2^-bits over bits in [min_bits, max_bits].
void write_theory_table(std::ostream& out, unsigned min_bits, unsigned max_bits);

}  // namespace binfuse::bench
