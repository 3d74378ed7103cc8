#pragma once

// Binary envelope, all integers little-endian:
//
//   offset  size  field
//        0     8  magic "BINFUSE\0"
//        8     2  format version (kFormatVersion)
//       10     1  kind: 0 fuse3, 1 fuse4, 2 xor3, 3 bloom
//       11     1  fingerprint bits (8 or 16), or Bloom hash count
//       12     4  reserved, zero
//       16     8  seed
//       24     8  fuse: segment length    xor: 0   bloom: bit count m
//       32     8  fuse: start segments    xor: 0   bloom: 0
//       40     8  fuse/xor: array length           bloom: 0
//       48     -  payload: array_length * bits/8 bytes, or m/8 bytes
//
// 16-bit fingerprints and Bloom words are stored little-endian.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "binfuse/filter.hpp"

namespace binfuse {

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 48;

std::vector<std::uint8_t> serialize(const FuseFilter& filter);
std::vector<std::uint8_t> serialize(const XorFilter& filter);
std::vector<std::uint8_t> serialize(const BloomFilter& filter);
std::vector<std::uint8_t> serialize(const AnyFilter& filter);

/// Throws FormatError on a bad magic, UnsupportedError on an unknown version,
/// kind or fingerprint width, and CorruptionError when the header is
/// inconsistent or the payload length is wrong.
AnyFilter deserialize(std::span<const std::uint8_t> bytes);

/// File helpers; I/O failures raise IoError naming the path.
void save_filter(const std::filesystem::path& path, const AnyFilter& filter);
AnyFilter load_filter(const std::filesystem::path& path);

}  // namespace binfuse
