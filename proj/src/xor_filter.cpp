#include "binfuse/xor_filter.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "binfuse/random.hpp"

namespace binfuse {

namespace {

bool peel_attempt(std::span<const std::uint64_t> keys, std::uint32_t array_length, Seed seed,
                  std::vector<std::uint64_t>& hashes, PeelingState& state) {
  hashes.resize(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) hashes[i] = mix64(keys[i], seed).value;
  const std::uint32_t block = array_length / 3;
  return detail::peel(hashes, array_length, state,
                      [block](std::uint64_t h) { return xor_locations(HashValue{h}, block); });
}

template <class T>
void assign_table(std::span<const PeelEntry> order, std::span<T> table, std::uint64_t mask) {
  const auto block = static_cast<std::uint32_t>(table.size() / 3);
  detail::assign(
      order, table, [block](std::uint64_t h) { return xor_locations(HashValue{h}, block); },
      [mask](std::uint64_t h) { return fold_fingerprint(HashValue{h}, mask); });
}

template <class T>
bool probe(HashValue h, std::uint32_t block, const T* table, std::uint64_t mask) noexcept {
  const auto loc = xor_locations(h, block);
  return (fold_fingerprint(h, mask) ^ table[loc[0]] ^ table[loc[1]] ^ table[loc[2]]) == 0;
}

}  // namespace

std::uint64_t xor_array_length(std::uint64_t n) {
  const std::uint64_t raw = static_cast<std::uint64_t>(1.23 * static_cast<double>(n)) + 32;
  return (raw + 2) / 3 * 3;
}

XorFilter::XorFilter(Seed seed, FingerprintTable fingerprints)
    : seed_(seed), table_(std::move(fingerprints)) {
  if (table_.size() == 0 || table_.size() % 3 != 0) {
    throw CorruptionError("xor filter array length must be a positive multiple of 3");
  }
}

XorBuild XorFilter::construct(std::span<const std::uint64_t> keys, const XorParams& params) {
  if (!supported_fingerprint_bits(params.fingerprint_bits)) {
    throw ConfigurationError("fingerprint width must be 8 or 16 bits, got " +
                             std::to_string(params.fingerprint_bits));
  }
  if (params.max_attempts == 0) throw ConfigurationError("max_attempts must be at least 1");
  const std::uint64_t length = xor_array_length(keys.size());
  if (length > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigurationError("set too large for 32-bit xor filter indexes");
  }
  const auto array_length = static_cast<std::uint32_t>(length);

  SplitMix64 seeds(params.seed_stream ? *params.seed_stream : entropy_seed());
  std::vector<std::uint64_t> hashes;
  PeelingState state;
  bool duplicates_checked = false;
  for (unsigned attempt = 1; attempt <= params.max_attempts; ++attempt) {
    const Seed seed{seeds()};
    if (peel_attempt(keys, array_length, seed, hashes, state)) {
      FingerprintTable table(params.fingerprint_bits, array_length);
      const std::uint64_t mask = fingerprint_mask(params.fingerprint_bits);
      if (params.fingerprint_bits == 8) {
        assign_table(std::span<const PeelEntry>(state.order), table.narrow(), mask);
      } else {
        assign_table(std::span<const PeelEntry>(state.order), table.wide(), mask);
      }
      return XorBuild{XorFilter(seed, std::move(table)), ConstructionReport{attempt, true, seed}};
    }
    if (attempt == kDuplicateCheckAfter || attempt == params.max_attempts) {
      if (!duplicates_checked) {
        std::vector<std::uint64_t> sorted(keys.begin(), keys.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
          throw DuplicateKeyError("input keys are not distinct", attempt);
        }
      }
      duplicates_checked = true;
    }
  }
  throw ConstructionError(
      "xor filter construction failed after " + std::to_string(params.max_attempts) + " attempts",
      params.max_attempts);
}

bool XorFilter::contains(std::uint64_t key) const noexcept {
  const HashValue h = mix64(key, seed_);
  const std::uint64_t mask = fingerprint_mask(table_.bits());
  if (table_.bits() == 8) return probe(h, block_length(), table_.narrow().data(), mask);
  return probe(h, block_length(), table_.wide().data(), mask);
}

PeelOutcome peel_xor(std::span<const std::uint64_t> keys, std::uint32_t array_length, Seed seed) {
  std::vector<std::uint64_t> hashes;
  PeelingState state;
  PeelOutcome out;
  out.success = peel_attempt(keys, array_length, seed, hashes, state);
  out.order = std::move(state.order);
  return out;
}

double bits_per_key(const XorFilter& filter, std::uint64_t n) {
  if (n == 0) throw UndefinedRatioError("bits per key is undefined for an empty set");
  return static_cast<double>(filter.array_length()) * filter.fingerprint_bits() /
         static_cast<double>(n);
}

}  // namespace binfuse
