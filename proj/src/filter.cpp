#include "binfuse/filter.hpp"

namespace binfuse {

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace

FilterKind kind_of(const AnyFilter& filter) noexcept {
  return std::visit(
      Overloaded{[](const FuseFilter& f) {
                   return f.arity() == 4 ? FilterKind::fuse4 : FilterKind::fuse3;
                 },
                 [](const XorFilter&) { return FilterKind::xor3; },
                 [](const BloomFilter&) { return FilterKind::bloom; }},
      filter);
}

std::string_view to_string(FilterKind kind) noexcept {
  switch (kind) {
    case FilterKind::fuse3: return "fuse3";
    case FilterKind::fuse4: return "fuse4";
    case FilterKind::xor3: return "xor";
    case FilterKind::bloom: return "bloom";
  }
  return "unknown";
}

std::optional<FilterKind> parse_filter_kind(std::string_view name) noexcept {
  if (name == "fuse3") return FilterKind::fuse3;
  if (name == "fuse4") return FilterKind::fuse4;
  if (name == "xor" || name == "xor3") return FilterKind::xor3;
  if (name == "bloom") return FilterKind::bloom;
  return std::nullopt;
}

bool contains(const AnyFilter& filter, std::uint64_t key) noexcept {
  return std::visit([key](const auto& f) { return f.contains(key); }, filter);
}

std::size_t size_in_bytes(const AnyFilter& filter) noexcept {
  return std::visit([](const auto& f) { return f.size_in_bytes(); }, filter);
}

}  // namespace binfuse
