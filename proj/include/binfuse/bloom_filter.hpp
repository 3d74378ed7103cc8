#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "binfuse/hashing.hpp"

namespace binfuse {

/// round(bits_per_key * ln 2), at least 1.
unsigned bloom_optimal_hash_count(double bits_per_key);

/// Keys hashed per batch in BloomFilter::add_all.
inline constexpr std::size_t kBloomBatch = 256;

/// Standard Bloom filter with double hashing: one 64-bit hash split into
/// h1 (low half) and h2 (high half), probe i at (h1 + i*h2) mod 2^32 scaled
/// onto the bit array.
class BloomFilter {
 public:
  BloomFilter() = default;

  /// Sizes the array to ceil(bits_per_key * expected_keys) bits rounded up to
  /// a whole 64-bit word (at least one word).
  BloomFilter(std::uint64_t expected_keys, double bits_per_key, unsigned hash_count, Seed seed);

  /// Adopts an existing bit array.
  BloomFilter(Seed seed, unsigned hash_count, std::vector<std::uint64_t> words);

  void add(std::uint64_t key) noexcept;
  /// Hashes keys in batches of kBloomBatch before touching the bit array.
  void add_all(std::span<const std::uint64_t> keys);
  bool contains(std::uint64_t key) const noexcept;

  std::uint64_t bit_count() const noexcept { return words_.size() * 64; }
  unsigned hash_count() const noexcept { return hash_count_; }
  Seed seed() const noexcept { return seed_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::size_t size_in_bytes() const noexcept { return words_.size() * sizeof(std::uint64_t); }
  /// Number of set bits.
  std::uint64_t population() const noexcept;

  friend bool operator==(const BloomFilter&, const BloomFilter&) = default;

 private:
  std::uint64_t bit_index(std::uint32_t probe) const noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(probe) * bit_count()) >> 32);
  }
  void set_bits(std::uint64_t hash) noexcept;

  Seed seed_;
  unsigned hash_count_ = 1;
  std::vector<std::uint64_t> words_;
};

double bits_per_key(const BloomFilter& filter, std::uint64_t n);

}  // namespace binfuse
