#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "binfuse/fingerprint_table.hpp"
#include "binfuse/fuse_filter.hpp"
#include "binfuse/hashing.hpp"

namespace binfuse {

/// floor(1.23 n) + 32, rounded up to a multiple of 3.
std::uint64_t xor_array_length(std::uint64_t n);

struct XorParams {
  unsigned fingerprint_bits = 8;
  unsigned max_attempts = 100;
  std::optional<std::uint64_t> seed_stream;
};

/// One probe per third of the array, each a multiply-high reduction of a
/// 32-bit window of offset_bits(h).
inline std::array<std::uint32_t, 3> xor_locations(HashValue h, std::uint32_t block_length) noexcept {
  const std::uint64_t g = offset_bits(h);
  return {reduce_to_range(static_cast<std::uint32_t>(g), block_length),
          reduce_to_range(static_cast<std::uint32_t>(std::rotl(g, 21)), block_length) +
              block_length,
          reduce_to_range(static_cast<std::uint32_t>(std::rotl(g, 42)), block_length) +
              2 * block_length};
}

struct XorBuild;

/// Classic 3-wise xor filter over three equal blocks.
class XorFilter {
 public:
  XorFilter() = default;
  /// Throws CorruptionError unless the table length is a positive multiple of 3.
  XorFilter(Seed seed, FingerprintTable fingerprints);

  static XorBuild construct(std::span<const std::uint64_t> keys, const XorParams& params = {});

  bool contains(std::uint64_t key) const noexcept;

  Seed seed() const noexcept { return seed_; }
  std::uint32_t array_length() const noexcept { return static_cast<std::uint32_t>(table_.size()); }
  std::uint32_t block_length() const noexcept { return array_length() / 3; }
  unsigned fingerprint_bits() const noexcept { return table_.bits(); }
  const FingerprintTable& fingerprints() const noexcept { return table_; }
  std::size_t size_in_bytes() const noexcept { return table_.byte_size(); }

  friend bool operator==(const XorFilter&, const XorFilter&) = default;

 private:
  Seed seed_;
  FingerprintTable table_;
};

struct XorBuild {
  XorFilter filter;
  ConstructionReport report;
};

/// One attempt with a fixed seed; exposed for tests.
PeelOutcome peel_xor(std::span<const std::uint64_t> keys, std::uint32_t array_length, Seed seed);

double bits_per_key(const XorFilter& filter, std::uint64_t n);

}  // namespace binfuse
