#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "binfuse/hashing.hpp"

namespace binfuse {

/// Zero-initialized array of 8- or 16-bit fingerprints.
class FingerprintTable {
 public:
  FingerprintTable() = default;

  FingerprintTable(unsigned bits, std::size_t length) : bits_(bits) {
    if (!supported_fingerprint_bits(bits)) {
      throw ConfigurationError("fingerprint width must be 8 or 16 bits, got " +
                               std::to_string(bits));
    }
    if (bits == 8) {
      narrow_.assign(length, 0);
    } else {
      wide_.assign(length, 0);
    }
  }

  unsigned bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return bits_ == 8 ? narrow_.size() : wide_.size(); }
  std::size_t byte_size() const noexcept { return size() * (bits_ / 8); }

  std::uint16_t operator[](std::size_t i) const noexcept {
    return bits_ == 8 ? narrow_[i] : wide_[i];
  }

  std::span<std::uint8_t> narrow() noexcept { return narrow_; }
  std::span<const std::uint8_t> narrow() const noexcept { return narrow_; }
  std::span<std::uint16_t> wide() noexcept { return wide_; }
  std::span<const std::uint16_t> wide() const noexcept { return wide_; }

  friend bool operator==(const FingerprintTable&, const FingerprintTable&) = default;

 private:
  unsigned bits_ = 8;
  std::vector<std::uint8_t> narrow_;
  std::vector<std::uint16_t> wide_;
};

}  // namespace binfuse
