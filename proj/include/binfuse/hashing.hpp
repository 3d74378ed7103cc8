#pragma once

#include <array>
#include <bit>
#include <cstdint>

#include "binfuse/error.hpp"

namespace binfuse {

struct Seed {
  std::uint64_t value = 0;
  friend constexpr bool operator==(Seed, Seed) = default;
};

/// Output of mix64. Fingerprint and locations are all carved from this one word.
struct HashValue {
  std::uint64_t value = 0;
  friend constexpr bool operator==(HashValue, HashValue) = default;
};

/// Murmur3 64-bit finalizer. A bijection on 64-bit words.
constexpr std::uint64_t murmur_fmix64(std::uint64_t h) noexcept {
  h ^= h >> 33;
  h *= UINT64_C(0xff51afd7ed558ccd);
  h ^= h >> 33;
  h *= UINT64_C(0xc4ceb9fe1a85ec53);
  h ^= h >> 33;
  return h;
}

constexpr HashValue mix64(std::uint64_t key, Seed seed) noexcept {
  return HashValue{murmur_fmix64(key ^ seed.value)};
}

/// floor(x * range / 2^32).
constexpr std::uint32_t reduce_to_range(std::uint32_t x, std::uint32_t range) noexcept {
  return static_cast<std::uint32_t>((static_cast<std::uint64_t>(x) * range) >> 32);
}

/// floor(x * range / 2^64).
constexpr std::uint64_t reduce_to_range(std::uint64_t x, std::uint64_t range) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * range) >> 64);
}

constexpr bool supported_fingerprint_bits(unsigned bits) noexcept {
  return bits == 8 || bits == 16;
}

constexpr std::uint64_t fingerprint_mask(unsigned bits) noexcept {
  return (UINT64_C(1) << bits) - 1;
}

// Unchecked variant for the hot paths; `mask` comes from fingerprint_mask.
constexpr std::uint64_t fold_fingerprint(HashValue h, std::uint64_t mask) noexcept {
  return (h.value ^ (h.value >> 32)) & mask;
}

/// Xor-folds h and keeps the low `bits` bits. Only 8 and 16 are supported.
inline std::uint64_t fingerprint(HashValue h, unsigned bits) {
  if (!supported_fingerprint_bits(bits)) {
    throw ConfigurationError("fingerprint width must be 8 or 16 bits, got " +
                             std::to_string(bits));
  }
  return fold_fingerprint(h, fingerprint_mask(bits));
}

/// Second mixing round feeding the in-segment offsets, so that they are
/// decorrelated from the fingerprint bits (low halves of both 32-bit words)
/// and from the start segment (top bits of h).
constexpr std::uint64_t offset_bits(HashValue h) noexcept {
  return murmur_fmix64(h.value ^ UINT64_C(0x9e3779b97f4a7c15));
}

/// Geometry of a binary fuse filter's fingerprint array.
struct FilterLayout {
  unsigned arity = 3;
  std::uint32_t segment_length = 1;  // power of two
  std::uint32_t start_segment_count = 1;
  std::uint32_t array_length = 3;

  std::uint32_t segment_mask() const noexcept { return segment_length - 1; }
  std::uint32_t segment_count() const noexcept {
    return start_segment_count + arity - 1;
  }
  /// Structural invariants: power-of-two segments, at least `arity` of them,
  /// and array_length covering them exactly.
  bool valid() const noexcept {
    return (arity == 3 || arity == 4) && segment_length != 0 &&
           std::has_single_bit(segment_length) && start_segment_count >= 1 &&
           static_cast<std::uint64_t>(start_segment_count + arity - 1) *
                   segment_length ==
               array_length;
  }
  friend constexpr bool operator==(const FilterLayout&, const FilterLayout&) = default;
};

/// Location of a key in each of `Arity` consecutive segments.
///
/// The start segment is the multiply-high reduction of h over the valid start
/// positions. Each in-segment offset is a disjoint window of offset_bits(h)
/// masked by segment_length - 1: 21-bit windows for arity 3, 16-bit windows for
/// arity 4. Arity 4 with segments wider than 2^16 switches to three 21-bit
/// windows plus one window of a rotated-and-remixed word.
template <unsigned Arity>
inline std::array<std::uint32_t, Arity> fuse_locations(HashValue h,
                                                       const FilterLayout& layout) noexcept {
  static_assert(Arity == 3 || Arity == 4);
  const std::uint64_t start = reduce_to_range(h.value, std::uint64_t{layout.start_segment_count});
  const std::uint64_t base = start * layout.segment_length;
  const std::uint64_t g = offset_bits(h);
  const std::uint64_t mask = layout.segment_mask();
  std::array<std::uint32_t, Arity> loc{};
  if constexpr (Arity == 3) {
    for (unsigned i = 0; i < 3; ++i) {
      loc[i] = static_cast<std::uint32_t>(base + std::uint64_t{i} * layout.segment_length +
                                          ((g >> (21 * i)) & mask));
    }
  } else if (layout.segment_length <= (1u << 16)) {
    for (unsigned i = 0; i < 4; ++i) {
      loc[i] = static_cast<std::uint32_t>(base + std::uint64_t{i} * layout.segment_length +
                                          ((g >> (16 * i)) & mask));
    }
  } else {
    for (unsigned i = 0; i < 3; ++i) {
      loc[i] = static_cast<std::uint32_t>(base + std::uint64_t{i} * layout.segment_length +
                                          ((g >> (21 * i)) & mask));
    }
    const std::uint64_t extra = murmur_fmix64(std::rotl(g, 32) ^ UINT64_C(0xc2b2ae3d27d4eb4f));
    loc[3] = static_cast<std::uint32_t>(base + 3 * std::uint64_t{layout.segment_length} +
                                        (extra & mask));
  }
  return loc;
}

struct Locations {
  std::array<std::uint32_t, 4> index{};
  unsigned count = 0;

  const std::uint32_t* begin() const noexcept { return index.data(); }
  const std::uint32_t* end() const noexcept { return index.data() + count; }
};

/// Runtime-arity wrapper around fuse_locations.
inline Locations segment_locations(HashValue h, const FilterLayout& layout) noexcept {
  Locations out;
  if (layout.arity == 4) {
    const auto loc = fuse_locations<4>(h, layout);
    out.index = loc;
    out.count = 4;
  } else {
    const auto loc = fuse_locations<3>(h, layout);
    out.index = {loc[0], loc[1], loc[2], 0};
    out.count = 3;
  }
  return out;
}

}  // namespace binfuse
