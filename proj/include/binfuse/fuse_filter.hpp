#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "binfuse/fingerprint_table.hpp"
#include "binfuse/hashing.hpp"
#include "binfuse/peeling.hpp"

namespace binfuse {

/// Largest segment the layout will pick, in slots.
inline constexpr std::uint32_t kMaxSegmentLength = 1u << 18;

/// Array sizing for a set of n keys.
///
/// Segment length is 2^floor(log_3.33(n) + 2.25) for arity 3 and
/// 2^floor(log_2.91(n) - 0.5) for arity 4, clamped to [1, kMaxSegmentLength].
/// The raw size is floor((0.875 + 0.25 max(1, ln 1e6 / ln n)) n), respectively
/// floor((0.77 + 0.305 max(1, ln 6e5 / ln n)) n), then rounded up to a whole
/// number of segments, never fewer than `arity`. Sets with n <= 1 use
/// 4-slot segments and a raw size of max(arity, 2n).
///
/// Throws ConfigurationError for arity outside {3, 4} or when the array would
/// not be addressable with 32-bit indexes.
FilterLayout compute_layout(std::uint64_t n, unsigned arity);

/// Table 1 raw size before rounding to whole segments.
std::uint64_t raw_array_size(std::uint64_t n, unsigned arity);

/// array_length / segment_length.
double segment_ratio(const FilterLayout& layout) noexcept;

struct ConstructionReport {
  unsigned attempts = 0;
  bool success = false;
  Seed final_seed;
};

struct FuseParams {
  unsigned arity = 3;
  unsigned fingerprint_bits = 8;
  unsigned max_attempts = 100;
  /// Seeds for successive attempts are drawn from a SplitMix64 stream started
  /// here. Unset means a fresh state from std::random_device.
  std::optional<std::uint64_t> seed_stream;
};

/// Consecutive failures after which the input is checked for duplicate keys.
inline constexpr unsigned kDuplicateCheckAfter = 10;


struct FuseBuild;

/// Immutable binary fuse filter with 3 or 4 probes per query.
class FuseFilter {
 public:
  FuseFilter() = default;

  /// Adopts a finished fingerprint array. Throws CorruptionError if the
  /// layout is inconsistent or does not match the table length.
  FuseFilter(Seed seed, FilterLayout layout, FingerprintTable fingerprints);

  /// Builds a filter over distinct keys.
  ///
  /// Throws DuplicateKeyError when the keys are not distinct, and
  /// ConstructionError when max_attempts seeds all fail to peel.
  static FuseBuild construct(std::span<const std::uint64_t> keys, const FuseParams& params = {});

  bool contains(std::uint64_t key) const noexcept;

  Seed seed() const noexcept { return seed_; }
  const FilterLayout& layout() const noexcept { return layout_; }
  unsigned arity() const noexcept { return layout_.arity; }
  unsigned fingerprint_bits() const noexcept { return table_.bits(); }
  const FingerprintTable& fingerprints() const noexcept { return table_; }

  /// Fingerprint storage in bytes; metadata is not counted.
  std::size_t size_in_bytes() const noexcept { return table_.byte_size(); }

  friend bool operator==(const FuseFilter&, const FuseFilter&) = default;

 private:
  Seed seed_;
  FilterLayout layout_;
  FingerprintTable table_;
};

struct FuseBuild {
  FuseFilter filter;
  ConstructionReport report;
};

/// array_length * k / n. Throws UndefinedRatioError for n == 0.
double bits_per_key(const FuseFilter& filter, std::uint64_t n);

/// Outcome of peeling one seed.
struct PeelOutcome {
  bool success = false;
  std::vector<PeelEntry> order;
};

/// One construction attempt with a fixed seed: hash, bucket by start segment,
/// and peel. Exposed for testing against independent peelers.
PeelOutcome peel_fuse(std::span<const std::uint64_t> keys, const FilterLayout& layout, Seed seed);

/// Turns a complete peel order into a filter.
FuseFilter assign_fuse(std::span<const PeelEntry> order, const FilterLayout& layout, Seed seed,
                       unsigned fingerprint_bits);

}  // namespace binfuse
