#include "binfuse/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>
#include <string>
#include <unordered_set>
#include <utility>

#include "binfuse/random.hpp"

namespace binfuse::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

// Out-of-line membership calls, so the timed loop measures a real call per
// query rather than a loop the optimizer has fused with the probe.
[[gnu::noinline]] bool probe_one(const FuseFilter& f, std::uint64_t key) { return f.contains(key); }
[[gnu::noinline]] bool probe_one(const XorFilter& f, std::uint64_t key) { return f.contains(key); }
[[gnu::noinline]] bool probe_one(const BloomFilter& f, std::uint64_t key) { return f.contains(key); }

template <class Filter>
std::uint64_t count_matches(const Filter& filter, std::span<const std::uint64_t> queries) {
  std::uint64_t matches = 0;
  for (const std::uint64_t key : queries) matches += probe_one(filter, key);
  return matches;
}

std::uint64_t count_matches(const AnyFilter& filter, std::span<const std::uint64_t> queries) {
  return std::visit([queries](const auto& f) { return count_matches(f, queries); }, filter);
}

std::string column_label(const BenchReport& r) {
  std::ostringstream os;
  os << to_string(r.kind) << '_' << r.precision;
  return os.str();
}

}  // namespace

void BenchConfig::validate() const {
  if (query_count < 1) throw ConfigurationError("query count must be at least 1");
  if (repetitions % 2 == 0) throw ConfigurationError("repetitions must be odd");
  if (!(in_set_fraction >= 0.0 && in_set_fraction <= 1.0)) {
    throw ConfigurationError("in-set fraction must lie in [0, 1]");
  }
  if (kind == FilterKind::bloom) {
    if (!(bloom_bits_per_key > 0)) throw ConfigurationError("bits per key must be positive");
  } else if (!supported_fingerprint_bits(fingerprint_bits)) {
    throw ConfigurationError("fingerprint width must be 8 or 16 bits");
  }
  if (n == 0 && in_set_fraction > 0) {
    throw ConfigurationError("an empty key set cannot supply in-set queries");
  }
}

double BenchConfig::precision() const noexcept {
  return kind == FilterKind::bloom ? bloom_bits_per_key : fingerprint_bits;
}

std::vector<std::uint64_t> generate_keys(std::uint64_t n, KeyMode mode, std::uint64_t seed) {
  std::vector<std::uint64_t> keys(n);
  if (mode == KeyMode::sequential) {
    for (std::uint64_t i = 0; i < n; ++i) keys[i] = i + 1;
    return keys;
  }
  SplitMix64 rng(seed);
  for (auto& k : keys) k = rng();

  std::vector<std::uint64_t> sorted(keys);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) return keys;

  // Rare: redraw later occurrences of repeated values.
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(n);
  for (auto& k : keys) {
    while (!seen.insert(k).second) k = rng();
  }
  return keys;
}

MemberIndex::MemberIndex(std::span<const std::uint64_t> keys) : sorted_(keys.begin(), keys.end()) {
  std::sort(sorted_.begin(), sorted_.end());
}

bool MemberIndex::contains(std::uint64_t key) const noexcept {
  return std::binary_search(sorted_.begin(), sorted_.end(), key);
}

QuerySet generate_query_set(std::span<const std::uint64_t> keys, std::uint64_t size,
                            double in_set_fraction, std::uint64_t seed) {
  if (!(in_set_fraction >= 0.0 && in_set_fraction <= 1.0)) {
    throw ConfigurationError("in-set fraction must lie in [0, 1]");
  }
  const auto members =
      static_cast<std::uint64_t>(std::floor(in_set_fraction * static_cast<double>(size)));
  if (members > 0 && keys.empty()) {
    throw ConfigurationError("cannot draw member queries from an empty key set");
  }
  SplitMix64 rng(seed);
  const MemberIndex index(keys);
  std::vector<std::pair<std::uint64_t, bool>> mixed;
  mixed.reserve(size);
  for (std::uint64_t i = 0; i < members; ++i) {
    mixed.emplace_back(keys[reduce_to_range(rng(), std::uint64_t{keys.size()})], true);
  }
  while (mixed.size() < size) {
    const std::uint64_t candidate = rng();
    if (!index.contains(candidate)) mixed.emplace_back(candidate, false);
  }
  std::shuffle(mixed.begin(), mixed.end(), rng);

  QuerySet out;
  out.keys.reserve(size);
  out.is_member.reserve(size);
  for (const auto& [key, member] : mixed) {
    out.keys.push_back(key);
    out.is_member.push_back(member);
  }
  out.member_count = members;
  return out;
}

BuiltFilter build_filter(const BenchConfig& config, std::span<const std::uint64_t> keys,
                         std::optional<std::uint64_t> seed_stream) {
  switch (config.kind) {
    case FilterKind::fuse3:
    case FilterKind::fuse4: {
      FuseParams params;
      params.arity = config.kind == FilterKind::fuse4 ? 4 : 3;
      params.fingerprint_bits = config.fingerprint_bits;
      params.seed_stream = seed_stream;
      auto built = FuseFilter::construct(keys, params);
      return {std::move(built.filter), built.report.attempts};
    }
    case FilterKind::xor3: {
      XorParams params;
      params.fingerprint_bits = config.fingerprint_bits;
      params.seed_stream = seed_stream;
      auto built = XorFilter::construct(keys, params);
      return {std::move(built.filter), built.report.attempts};
    }
    case FilterKind::bloom: {
      const unsigned hashes =
          config.bloom_hash_count.value_or(bloom_optimal_hash_count(config.bloom_bits_per_key));
      const Seed seed{seed_stream ? SplitMix64(*seed_stream)() : entropy_seed()};
      BloomFilter filter(keys.size(), config.bloom_bits_per_key, hashes, seed);
      filter.add_all(keys);
      return {std::move(filter), 1};
    }
  }
  throw ConfigurationError("unknown filter kind");
}

double time_construction(const BenchConfig& config, std::span<const std::uint64_t> keys,
                         double min_seconds) {
  config.validate();
  SplitMix64 seeds(config.rng_seed ^ UINT64_C(0xc0ffee));
  std::vector<double> runs;
  std::size_t sink = 0;
  for (unsigned rep = 0; rep < config.repetitions; ++rep) {
    std::uint64_t builds = 0;
    const auto start = Clock::now();
    double elapsed = 0;
    do {
      sink += size_in_bytes(build_filter(config, keys, seeds()).filter);
      ++builds;
      elapsed = seconds_since(start);
    } while (elapsed < min_seconds);
    runs.push_back(elapsed * 1e9 / static_cast<double>(builds));
  }
  if (sink == 0) runs.push_back(0);  // keeps `sink` observable
  return median(std::move(runs)) / static_cast<double>(std::max<std::uint64_t>(keys.size(), 1));
}

double time_construction(const BenchConfig& config) {
  const auto keys = generate_keys(config.n, config.key_mode, config.rng_seed);
  return time_construction(config, keys);
}

QueryTiming time_queries(const AnyFilter& filter, std::span<const std::uint64_t> queries,
                         unsigned repetitions) {
  QueryTiming out;
  if (queries.empty()) return out;
  out.matches = count_matches(filter, queries);  // warm-up
  std::vector<double> runs;
  for (unsigned rep = 0; rep < std::max(repetitions, 1u); ++rep) {
    const auto start = Clock::now();
    const std::uint64_t matches = count_matches(filter, queries);
    runs.push_back(seconds_since(start) * 1e9 / static_cast<double>(queries.size()));
    out.matches = matches;
  }
  out.ns_per_key = median(std::move(runs));
  return out;
}

double measure_fpp(const AnyFilter& filter, std::span<const std::uint64_t> members,
                   std::uint64_t non_member_count, std::uint64_t seed) {
  if (non_member_count < 1'000'000) {
    throw ConfigurationError("false-positive measurement needs at least 10^6 queries");
  }
  const MemberIndex index(members);
  SplitMix64 rng(seed);
  std::uint64_t positives = 0;
  for (std::uint64_t done = 0; done < non_member_count;) {
    const std::uint64_t key = rng();
    // A rejected key cannot be a member, so only accepted keys need the
    // membership lookup.
    if (contains(filter, key)) {
      if (index.contains(key)) continue;
      ++positives;
    }
    ++done;
  }
  return static_cast<double>(positives) / static_cast<double>(non_member_count);
}

double query_set_fpp(const AnyFilter& filter, const QuerySet& queries) {
  std::uint64_t positives = 0;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < queries.keys.size(); ++i) {
    if (queries.is_member[i]) continue;
    positives += contains(filter, queries.keys[i]);
    ++total;
  }
  return total == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(total);
}

BenchReport run_bench(const BenchConfig& config) {
  config.validate();
  const auto keys = generate_keys(config.n, config.key_mode, config.rng_seed);

  BenchReport report;
  report.kind = config.kind;
  report.n = config.n;
  report.precision = config.precision();
  report.construction_ns_per_key = time_construction(config, keys);

  const auto built = build_filter(config, keys, config.rng_seed);
  report.attempts = built.attempts;
  report.bits_per_key =
      config.n == 0 ? 0.0
                    : 8.0 * static_cast<double>(size_in_bytes(built.filter)) /
                          static_cast<double>(config.n);

  const auto queries = generate_query_set(keys, config.query_count, config.in_set_fraction,
                                          config.rng_seed + 1);
  const auto timing = time_queries(built.filter, queries.keys, config.repetitions);
  report.query_ns_per_key = timing.ns_per_key;
  report.matches = timing.matches;
  report.measured_fpp = query_set_fpp(built.filter, queries);
  return report;
}

double theoretical_space(TheoryKind kind, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigurationError("false-positive probability must lie in (0, 1)");
  }
  const double bits = std::log2(1.0 / epsilon);
  switch (kind) {
    case TheoryKind::bloom: return 1.44 * bits;
    case TheoryKind::xor3: return 1.23 * bits;
    case TheoryKind::xor_plus: return 1.0824 * bits + 0.5125;
    case TheoryKind::fuse3: return 1.125 * bits;
    case TheoryKind::fuse4: return 1.075 * bits;
    case TheoryKind::lower_bound: return bits;
  }
  throw ConfigurationError("unknown filter kind");
}

double theoretical_space(std::string_view kind, double epsilon) {
  for (const TheoryKind k : kTheoryKinds) {
    if (to_string(k) == kind) return theoretical_space(k, epsilon);
  }
  throw ConfigurationError("unknown filter kind '" + std::string(kind) + "'");
}

std::string_view to_string(TheoryKind kind) noexcept {
  switch (kind) {
    case TheoryKind::bloom: return "bloom";
    case TheoryKind::xor3: return "xor";
    case TheoryKind::xor_plus: return "xor+";
    case TheoryKind::fuse3: return "fuse3";
    case TheoryKind::fuse4: return "fuse4";
    case TheoryKind::lower_bound: return "lower-bound";
  }
  return "unknown";
}

void emit_report(std::span<const BenchReport> reports, std::ostream& out) {
  std::vector<BenchReport> rows(reports.begin(), reports.end());
  std::stable_sort(rows.begin(), rows.end(), [](const BenchReport& a, const BenchReport& b) {
    return std::tie(a.kind, a.n, a.precision) < std::tie(b.kind, b.n, b.precision);
  });
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.kind) << ',' << r.n << ',' << r.precision << ',' << r.construction_ns_per_key
        << ',' << r.query_ns_per_key << ',' << r.measured_fpp << ',' << r.bits_per_key << ','
        << r.attempts << ',' << r.matches << '\n';
  }
}

void emit_report(std::span<const BenchReport> reports, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  emit_report(reports, out);
  if (!out) throw IoError("write to " + path.string() + " failed");
}

void write_figure_data(std::span<const BenchReport> reports, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::string> columns;
  std::map<std::uint64_t, std::map<std::string, const BenchReport*>> table;
  for (const auto& r : reports) {
    const auto label = column_label(r);
    if (std::find(columns.begin(), columns.end(), label) == columns.end()) columns.push_back(label);
    table[r.n][label] = &r;
  }

  const std::pair<const char*, double BenchReport::*> figures[] = {
      {"construction_time.dat", &BenchReport::construction_ns_per_key},
      {"query_time.dat", &BenchReport::query_ns_per_key},
      {"bits_per_key.dat", &BenchReport::bits_per_key},
      {"false_positive_rate.dat", &BenchReport::measured_fpp},
  };
  for (const auto& [name, field] : figures) {
    const auto path = dir / name;
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "# n";
    for (const auto& c : columns) out << ' ' << c;
    out << '\n';
    for (const auto& [n, row] : table) {
      out << n;
      for (const auto& c : columns) {
        const auto it = row.find(c);
        if (it == row.end()) {
          out << " nan";
        } else {
          out << ' ' << it->second->*field;
        }
      }
      out << '\n';
    }
    if (!out) throw IoError("write to " + path.string() + " failed");
  }
}

void write_theory_table(std::ostream& out, unsigned min_bits, unsigned max_bits) {
  out << "log2_inv_epsilon,epsilon";
  for (const TheoryKind k : kTheoryKinds) out << ',' << to_string(k);
  out << '\n';
  const auto flags = out.flags();
  const auto precision = out.precision();
  for (unsigned bits = min_bits; bits <= max_bits; ++bits) {
    const double epsilon = std::ldexp(1.0, -static_cast<int>(bits));
    out << bits << ',' << std::defaultfloat << std::setprecision(6) << epsilon;
    out << std::fixed << std::setprecision(2);
    for (const TheoryKind k : kTheoryKinds) out << ',' << theoretical_space(k, epsilon);
    out << std::defaultfloat << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace binfuse::bench
