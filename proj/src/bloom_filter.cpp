#include "binfuse/bloom_filter.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace binfuse {

unsigned bloom_optimal_hash_count(double bits_per_key) {
  if (!(bits_per_key > 0)) throw ConfigurationError("bits per key must be positive");
  return std::max(1u, static_cast<unsigned>(std::lround(bits_per_key * std::numbers::ln2)));
}

BloomFilter::BloomFilter(std::uint64_t expected_keys, double bits_per_key, unsigned hash_count,
                         Seed seed)
    : seed_(seed), hash_count_(hash_count) {
  if (!(bits_per_key > 0)) throw ConfigurationError("bits per key must be positive");
  if (hash_count == 0) throw ConfigurationError("a Bloom filter needs at least one hash");
  const auto bits =
      static_cast<std::uint64_t>(std::ceil(bits_per_key * static_cast<double>(expected_keys)));
  words_.assign(std::max<std::uint64_t>(1, (bits + 63) / 64), 0);
}

BloomFilter::BloomFilter(Seed seed, unsigned hash_count, std::vector<std::uint64_t> words)
    : seed_(seed), hash_count_(hash_count), words_(std::move(words)) {
  if (hash_count_ == 0 || words_.empty()) {
    throw CorruptionError("Bloom filter needs a nonempty bit array and at least one hash");
  }
}

void BloomFilter::set_bits(std::uint64_t hash) noexcept {
  const auto h1 = static_cast<std::uint32_t>(hash);
  const auto h2 = static_cast<std::uint32_t>(hash >> 32);
  std::uint32_t g = h1;
  for (unsigned i = 0; i < hash_count_; ++i, g += h2) {
    const std::uint64_t bit = bit_index(g);
    words_[bit >> 6] |= std::uint64_t{1} << (bit & 63);
  }
}

void BloomFilter::add(std::uint64_t key) noexcept { set_bits(mix64(key, seed_).value); }

void BloomFilter::add_all(std::span<const std::uint64_t> keys) {
  std::array<std::uint64_t, kBloomBatch> batch;
  for (std::size_t offset = 0; offset < keys.size(); offset += kBloomBatch) {
    const std::size_t len = std::min(kBloomBatch, keys.size() - offset);
    for (std::size_t i = 0; i < len; ++i) batch[i] = mix64(keys[offset + i], seed_).value;
    for (std::size_t i = 0; i < len; ++i) set_bits(batch[i]);
  }
}

bool BloomFilter::contains(std::uint64_t key) const noexcept {
  const std::uint64_t hash = mix64(key, seed_).value;
  const auto h1 = static_cast<std::uint32_t>(hash);
  const auto h2 = static_cast<std::uint32_t>(hash >> 32);
  std::uint32_t g = h1;
  for (unsigned i = 0; i < hash_count_; ++i, g += h2) {
    const std::uint64_t bit = bit_index(g);
    if ((words_[bit >> 6] & (std::uint64_t{1} << (bit & 63))) == 0) return false;
  }
  return true;
}

std::uint64_t BloomFilter::population() const noexcept {
  return std::accumulate(words_.begin(), words_.end(), std::uint64_t{0},
                         [](std::uint64_t acc, std::uint64_t w) { return acc + std::popcount(w); });
}

double bits_per_key(const BloomFilter& filter, std::uint64_t n) {
  if (n == 0) throw UndefinedRatioError("bits per key is undefined for an empty set");
  return static_cast<double>(filter.bit_count()) / static_cast<double>(n);
}

}  // namespace binfuse
