#include "binfuse/fuse_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "binfuse/random.hpp"

namespace binfuse {

namespace {

void check_arity(unsigned arity) {
  if (arity != 3 && arity != 4) {
    throw ConfigurationError("fuse filter arity must be 3 or 4, got " + std::to_string(arity));
  }
}

// n <= 1 reuses the n = 2 segment length: 4 for arity 3, 1 for arity 4.
std::uint32_t segment_length_for(std::uint64_t n, unsigned arity) {
  const double size = static_cast<double>(std::max<std::uint64_t>(n, 2));
  const double exponent = arity == 3 ? std::log(size) / std::log(3.33) + 2.25
                                     : std::log(size) / std::log(2.91) - 0.5;
  const double capped = std::clamp(std::floor(exponent), 0.0,
                                   static_cast<double>(std::countr_zero(kMaxSegmentLength)));
  return std::uint32_t{1} << static_cast<unsigned>(capped);
}

bool has_duplicates(std::span<const std::uint64_t> keys) {
  std::vector<std::uint64_t> sorted(keys.begin(), keys.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

// Scratch buffers reused across attempts.
struct Workspace {
  std::vector<std::uint64_t> hashes;
  std::vector<std::uint64_t> bucketed;
  std::vector<std::uint32_t> bucket_start;
  PeelingState state;
};

template <unsigned Arity>
bool peel_attempt(std::span<const std::uint64_t> keys, const FilterLayout& layout, Seed seed,
                  Workspace& ws) {
  const std::size_t n = keys.size();
  ws.hashes.resize(n);
  ws.bucketed.resize(n);
  ws.bucket_start.assign(std::size_t{layout.start_segment_count} + 1, 0);

  // Counting sort by start segment, so that counter updates sweep the array
  // forward instead of jumping around.
  const std::uint64_t starts = layout.start_segment_count;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t h = mix64(keys[i], seed).value;
    ws.hashes[i] = h;
    ++ws.bucket_start[reduce_to_range(h, starts) + 1];
  }
  for (std::size_t s = 1; s < ws.bucket_start.size(); ++s) {
    ws.bucket_start[s] += ws.bucket_start[s - 1];
  }
  for (const std::uint64_t h : ws.hashes) {
    ws.bucketed[ws.bucket_start[reduce_to_range(h, starts)]++] = h;
  }

  return detail::peel(ws.bucketed, layout.array_length, ws.state, [&layout](std::uint64_t h) {
    return fuse_locations<Arity>(HashValue{h}, layout);
  });
}

bool peel_attempt(std::span<const std::uint64_t> keys, const FilterLayout& layout, Seed seed,
                  Workspace& ws) {
  return layout.arity == 4 ? peel_attempt<4>(keys, layout, seed, ws)
                           : peel_attempt<3>(keys, layout, seed, ws);
}

template <unsigned Arity, class T>
void assign_table(std::span<const PeelEntry> order, const FilterLayout& layout, std::span<T> table,
                  std::uint64_t mask) {
  detail::assign(
      order, table,
      [&layout](std::uint64_t h) { return fuse_locations<Arity>(HashValue{h}, layout); },
      [mask](std::uint64_t h) { return fold_fingerprint(HashValue{h}, mask); });
}

template <unsigned Arity, class T>
bool probe(HashValue h, const FilterLayout& layout, const T* table, std::uint64_t mask) noexcept {
  const auto loc = fuse_locations<Arity>(h, layout);
  std::uint64_t acc = fold_fingerprint(h, mask);
  for (const std::uint32_t l : loc) acc ^= table[l];
  return acc == 0;
}

}  // namespace

std::uint64_t raw_array_size(std::uint64_t n, unsigned arity) {
  check_arity(arity);
  if (n <= 1) return std::max<std::uint64_t>(arity, 2 * n);
  const double size = static_cast<double>(n);
  const double factor = arity == 3
                            ? 0.875 + 0.25 * std::max(1.0, std::log(1e6) / std::log(size))
                            : 0.77 + 0.305 * std::max(1.0, std::log(6e5) / std::log(size));
  // The relative nudge absorbs representation error in factors such as 1.075,
  // so that e.g. 1.075 * 1e6 floors to 1075000 rather than 1074999.
  return static_cast<std::uint64_t>(std::floor(factor * size * (1.0 + 1e-12)));
}

FilterLayout compute_layout(std::uint64_t n, unsigned arity) {
  check_arity(arity);
  const std::uint64_t segment = segment_length_for(n, arity);
  const std::uint64_t raw = raw_array_size(n, arity);
  const std::uint64_t segments = std::max<std::uint64_t>((raw + segment - 1) / segment, arity);
  const std::uint64_t length = segments * segment;
  if (length > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigurationError("set of " + std::to_string(n) +
                             " keys exceeds the 32-bit addressable fingerprint array");
  }
  FilterLayout layout;
  layout.arity = arity;
  layout.segment_length = static_cast<std::uint32_t>(segment);
  layout.start_segment_count = static_cast<std::uint32_t>(segments - (arity - 1));
  layout.array_length = static_cast<std::uint32_t>(length);
  return layout;
}

double segment_ratio(const FilterLayout& layout) noexcept {
  return static_cast<double>(layout.array_length) / layout.segment_length;
}

FuseFilter::FuseFilter(Seed seed, FilterLayout layout, FingerprintTable fingerprints)
    : seed_(seed), layout_(layout), table_(std::move(fingerprints)) {
  if (!layout_.valid()) throw CorruptionError("inconsistent fuse filter layout");
  if (table_.size() != layout_.array_length) {
    throw CorruptionError("fingerprint array length " + std::to_string(table_.size()) +
                          " does not match layout length " +
                          std::to_string(layout_.array_length));
  }
}

FuseBuild FuseFilter::construct(std::span<const std::uint64_t> keys, const FuseParams& params) {
  if (!supported_fingerprint_bits(params.fingerprint_bits)) {
    throw ConfigurationError("fingerprint width must be 8 or 16 bits, got " +
                             std::to_string(params.fingerprint_bits));
  }
  if (params.max_attempts == 0) throw ConfigurationError("max_attempts must be at least 1");
  const FilterLayout layout = compute_layout(keys.size(), params.arity);

  SplitMix64 seeds(params.seed_stream ? *params.seed_stream : entropy_seed());
  Workspace ws;
  bool duplicates_checked = false;
  for (unsigned attempt = 1; attempt <= params.max_attempts; ++attempt) {
    const Seed seed{seeds()};
    if (peel_attempt(keys, layout, seed, ws)) {
      return FuseBuild{assign_fuse(ws.state.order, layout, seed, params.fingerprint_bits),
                       ConstructionReport{attempt, true, seed}};
    }
    if (attempt == kDuplicateCheckAfter || attempt == params.max_attempts) {
      if (!duplicates_checked && has_duplicates(keys)) {
        throw DuplicateKeyError("input keys are not distinct", attempt);
      }
      duplicates_checked = true;
    }
  }
  throw ConstructionError(
      "fuse filter construction failed after " + std::to_string(params.max_attempts) + " attempts",
      params.max_attempts);
}

bool FuseFilter::contains(std::uint64_t key) const noexcept {
  const HashValue h = mix64(key, seed_);
  const std::uint64_t mask = fingerprint_mask(table_.bits());
  if (table_.bits() == 8) {
    const auto* t = table_.narrow().data();
    return layout_.arity == 3 ? probe<3>(h, layout_, t, mask) : probe<4>(h, layout_, t, mask);
  }
  const auto* t = table_.wide().data();
  return layout_.arity == 3 ? probe<3>(h, layout_, t, mask) : probe<4>(h, layout_, t, mask);
}

double bits_per_key(const FuseFilter& filter, std::uint64_t n) {
  if (n == 0) throw UndefinedRatioError("bits per key is undefined for an empty set");
  return static_cast<double>(filter.layout().array_length) * filter.fingerprint_bits() /
         static_cast<double>(n);
}

PeelOutcome peel_fuse(std::span<const std::uint64_t> keys, const FilterLayout& layout, Seed seed) {
  Workspace ws;
  PeelOutcome out;
  out.success = peel_attempt(keys, layout, seed, ws);
  out.order = std::move(ws.state.order);
  return out;
}

FuseFilter assign_fuse(std::span<const PeelEntry> order, const FilterLayout& layout, Seed seed,
                       unsigned fingerprint_bits) {
  FingerprintTable table(fingerprint_bits, layout.array_length);
  const std::uint64_t mask = fingerprint_mask(fingerprint_bits);
  if (fingerprint_bits == 8) {
    if (layout.arity == 3) {
      assign_table<3>(order, layout, table.narrow(), mask);
    } else {
      assign_table<4>(order, layout, table.narrow(), mask);
    }
  } else if (layout.arity == 3) {
    assign_table<3>(order, layout, table.wide(), mask);
  } else {
    assign_table<4>(order, layout, table.wide(), mask);
  }
  return FuseFilter(seed, layout, std::move(table));
}

}  // namespace binfuse
