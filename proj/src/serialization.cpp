#include "binfuse/serialization.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace binfuse {

namespace {

constexpr std::array<std::uint8_t, 8> kMagic = {'B', 'I', 'N', 'F', 'U', 'S', 'E', 0};

class Writer {
 public:
  explicit Writer(std::size_t payload) { out_.reserve(kHeaderSize + payload); }

  template <class T>
  void put(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i)));
    }
  }
  void bytes(std::span<const std::uint8_t> data) { out_.insert(out_.end(), data.begin(), data.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

template <class T>
T read_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  }
  return static_cast<T>(v);
}

struct Header {
  FilterKind kind;
  std::uint8_t width;
  Seed seed;
  std::uint64_t field_a;
  std::uint64_t field_b;
  std::uint64_t field_c;
};

void write_header(Writer& w, const Header& h) {
  w.bytes(kMagic);
  w.put(kFormatVersion);
  w.put(static_cast<std::uint8_t>(h.kind));
  w.put(h.width);
  w.put(std::uint32_t{0});
  w.put(h.seed.value);
  w.put(h.field_a);
  w.put(h.field_b);
  w.put(h.field_c);
}

void write_table(Writer& w, const FingerprintTable& table) {
  if (table.bits() == 8) {
    w.bytes(table.narrow());
  } else {
    for (const std::uint16_t v : table.wide()) w.put(v);
  }
}

FingerprintTable read_table(std::span<const std::uint8_t> payload, unsigned bits,
                            std::size_t length) {
  FingerprintTable table(bits, length);
  if (bits == 8) {
    std::memcpy(table.narrow().data(), payload.data(), length);
  } else {
    auto wide = table.wide();
    for (std::size_t i = 0; i < length; ++i) wide[i] = read_le<std::uint16_t>(payload, 2 * i);
  }
  return table;
}

void expect_payload(std::span<const std::uint8_t> payload, std::uint64_t expected) {
  if (payload.size() != expected) {
    throw CorruptionError("payload is " + std::to_string(payload.size()) +
                          " bytes, header requires " + std::to_string(expected));
  }
}

}  // namespace

std::vector<std::uint8_t> serialize(const FuseFilter& filter) {
  const auto& layout = filter.layout();
  Writer w(filter.size_in_bytes());
  write_header(w, {layout.arity == 4 ? FilterKind::fuse4 : FilterKind::fuse3,
                   static_cast<std::uint8_t>(filter.fingerprint_bits()), filter.seed(),
                   layout.segment_length, layout.start_segment_count, layout.array_length});
  write_table(w, filter.fingerprints());
  return w.take();
}

std::vector<std::uint8_t> serialize(const XorFilter& filter) {
  Writer w(filter.size_in_bytes());
  write_header(w, {FilterKind::xor3, static_cast<std::uint8_t>(filter.fingerprint_bits()),
                   filter.seed(), 0, 0, filter.array_length()});
  write_table(w, filter.fingerprints());
  return w.take();
}

std::vector<std::uint8_t> serialize(const BloomFilter& filter) {
  Writer w(filter.size_in_bytes());
  write_header(w, {FilterKind::bloom, static_cast<std::uint8_t>(filter.hash_count()),
                   filter.seed(), filter.bit_count(), 0, 0});
  for (const std::uint64_t word : filter.words()) w.put(word);
  return w.take();
}

std::vector<std::uint8_t> serialize(const AnyFilter& filter) {
  return std::visit([](const auto& f) { return serialize(f); }, filter);
}

AnyFilter deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("not a filter file: bad magic");
  }
  if (bytes.size() < kHeaderSize) throw CorruptionError("truncated header");
  const auto version = read_le<std::uint16_t>(bytes, 8);
  if (version != kFormatVersion) {
    throw UnsupportedError("unsupported format version " + std::to_string(version));
  }
  const auto kind_byte = bytes[10];
  if (kind_byte > static_cast<std::uint8_t>(FilterKind::bloom)) {
    throw UnsupportedError("unknown filter kind " + std::to_string(kind_byte));
  }
  const auto kind = static_cast<FilterKind>(kind_byte);
  const unsigned width = bytes[11];
  if (read_le<std::uint32_t>(bytes, 12) != 0) throw CorruptionError("reserved header bytes set");
  const Seed seed{read_le<std::uint64_t>(bytes, 16)};
  const auto field_a = read_le<std::uint64_t>(bytes, 24);
  const auto field_b = read_le<std::uint64_t>(bytes, 32);
  const auto field_c = read_le<std::uint64_t>(bytes, 40);
  const auto payload = bytes.subspan(kHeaderSize);

  if (kind == FilterKind::bloom) {
    if (width == 0 || field_a == 0 || field_a % 64 != 0 || field_b != 0 || field_c != 0) {
      throw CorruptionError("inconsistent Bloom filter header");
    }
    expect_payload(payload, field_a / 8);
    std::vector<std::uint64_t> words(field_a / 64);
    for (std::size_t i = 0; i < words.size(); ++i) words[i] = read_le<std::uint64_t>(payload, 8 * i);
    return BloomFilter(seed, width, std::move(words));
  }

  if (!supported_fingerprint_bits(width)) {
    throw UnsupportedError("unsupported fingerprint width " + std::to_string(width));
  }
  if (field_c > UINT32_MAX) throw CorruptionError("array length out of range");
  expect_payload(payload, field_c * (width / 8));

  if (kind == FilterKind::xor3) {
    if (field_a != 0 || field_b != 0) throw CorruptionError("inconsistent xor filter header");
    return XorFilter(seed, read_table(payload, width, field_c));
  }
  if (field_a > UINT32_MAX || field_b > UINT32_MAX) {
    throw CorruptionError("fuse layout out of range");
  }
  FilterLayout layout;
  layout.arity = kind == FilterKind::fuse4 ? 4 : 3;
  layout.segment_length = static_cast<std::uint32_t>(field_a);
  layout.start_segment_count = static_cast<std::uint32_t>(field_b);
  layout.array_length = static_cast<std::uint32_t>(field_c);
  if (!layout.valid()) throw CorruptionError("inconsistent fuse filter layout");
  return FuseFilter(seed, layout, read_table(payload, width, field_c));
}

void save_filter(const std::filesystem::path& path, const AnyFilter& filter) {
  const auto bytes = serialize(filter);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to " + path.string() + " failed");
}

AnyFilter load_filter(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read from " + path.string() + " failed");
  return deserialize(bytes);
}

}  // namespace binfuse
