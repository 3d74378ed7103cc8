#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "binfuse/bloom_filter.hpp"
#include "binfuse/fuse_filter.hpp"
#include "binfuse/xor_filter.hpp"

namespace binfuse {

enum class FilterKind : std::uint8_t { fuse3 = 0, fuse4 = 1, xor3 = 2, bloom = 3 };

using AnyFilter = std::variant<FuseFilter, XorFilter, BloomFilter>;

FilterKind kind_of(const AnyFilter& filter) noexcept;
std::string_view to_string(FilterKind kind) noexcept;
/// Accepts "fuse3", "fuse4", "xor" / "xor3" and "bloom".
std::optional<FilterKind> parse_filter_kind(std::string_view name) noexcept;

bool contains(const AnyFilter& filter, std::uint64_t key) noexcept;
std::size_t size_in_bytes(const AnyFilter& filter) noexcept;

}  // namespace binfuse
