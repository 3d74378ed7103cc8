// fusebench: build, query and benchmark binary fuse, xor and Bloom filters.
//
// Exit codes: 0 success, 1 construction failure, 2 bad arguments,
// 3 I/O or file format error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "binfuse/bench.hpp"
#include "binfuse/serialization.hpp"

namespace {

using namespace binfuse;

enum ExitCode : int { kOk = 0, kConstructionFailed = 1, kBadArguments = 2, kIoError = 3 };

// Accepts plain integers and exact scientific notation such as 1e6.
std::uint64_t parse_count(const std::string& text) {
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size() || value < 0 || value != std::floor(value) || value > 1e18) {
    throw ConfigurationError("not a nonnegative integer: " + text);
  }
  return static_cast<std::uint64_t>(value);
}

FilterKind parse_kind(const std::string& name) {
  if (const auto kind = parse_filter_kind(name)) return *kind;
  throw ConfigurationError("unknown filter '" + name + "' (expected fuse3, fuse4, xor or bloom)");
}

bench::KeyMode parse_key_mode(const std::string& name) {
  if (name == "random") return bench::KeyMode::random;
  if (name == "sequential") return bench::KeyMode::sequential;
  throw ConfigurationError("unknown key mode '" + name + "'");
}

std::vector<std::uint64_t> read_keys(std::istream& in) {
  std::vector<std::uint64_t> keys;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      const auto value = std::stoull(token, &used, 0);
      if (used != token.size()) throw std::invalid_argument(token);
      keys.push_back(value);
    } catch (const std::logic_error&) {
      throw ConfigurationError("not a 64-bit key: " + token);
    }
  }
  return keys;
}

// Options shared by the subcommands that build a filter.
struct FilterOptions {
  std::string filter = "fuse3";
  unsigned bits = 8;
  double bits_per_key = 12;
  std::optional<unsigned> hashes;
  std::string key_mode = "random";
  std::uint64_t seed = 0x5eed;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--filter", filter, "fuse3, fuse4, xor or bloom")->capture_default_str();
    cmd.add_option("--bits", bits, "Fingerprint bits for fuse and xor filters")
        ->check(CLI::IsMember({8u, 16u}))
        ->capture_default_str();
    cmd.add_option("--bits-per-key", bits_per_key, "Bloom filter bits per key")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--hashes", hashes, "Bloom hash count (default: optimal for --bits-per-key)")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--key-mode", key_mode, "random or sequential")->capture_default_str();
    cmd.add_option("--seed", seed, "Dataset seed")->capture_default_str();
  }

  bench::BenchConfig config(FilterKind kind, std::uint64_t n) const {
    bench::BenchConfig c;
    c.kind = kind;
    c.n = n;
    c.fingerprint_bits = bits;
    c.bloom_bits_per_key = bits_per_key;
    c.bloom_hash_count = hashes;
    c.key_mode = parse_key_mode(key_mode);
    c.rng_seed = seed;
    return c;
  }
};

int run_build(const FilterOptions& opts, const std::string& n_text, const std::string& keys_path,
              const std::string& out) {
  std::vector<std::uint64_t> keys;
  auto config = opts.config(parse_kind(opts.filter), 0);
  if (!keys_path.empty()) {
    std::ifstream in(keys_path);
    if (!in) throw IoError("cannot open " + keys_path);
    keys = read_keys(in);
  } else {
    keys = bench::generate_keys(parse_count(n_text), config.key_mode, config.rng_seed);
  }
  config.n = keys.size();
  const auto built = bench::build_filter(config, keys);
  save_filter(out, built.filter);
  std::cout << "filter=" << to_string(config.kind) << " n=" << keys.size()
            << " attempts=" << built.attempts << " bytes=" << size_in_bytes(built.filter);
  if (!keys.empty()) {
    std::cout << " bits_per_key=" << 8.0 * size_in_bytes(built.filter) / keys.size();
  }
  std::cout << " out=" << out << '\n';
  return kOk;
}

int run_query(const std::string& in_path) {
  const AnyFilter filter = load_filter(in_path);
  for (const auto key : read_keys(std::cin)) {
    std::cout << (contains(filter, key) ? "true" : "false") << '\n';
  }
  return kOk;
}

int run_fpp(const FilterOptions& opts, const std::string& n_text, const std::string& queries) {
  auto config = opts.config(parse_kind(opts.filter), parse_count(n_text));
  config.in_set_fraction = 0;
  config.validate();
  const auto keys = bench::generate_keys(config.n, config.key_mode, config.rng_seed);
  const auto built = bench::build_filter(config, keys, config.rng_seed);
  const auto count = parse_count(queries);
  const double rate = bench::measure_fpp(built.filter, keys, count, config.rng_seed + 2);
  std::cout << "filter=" << to_string(config.kind) << " n=" << config.n << " queries=" << count
            << " fpp=" << std::setprecision(6) << rate << '\n';
  return kOk;
}

int run_bench(const FilterOptions& opts, const std::vector<std::string>& filters,
              const std::vector<std::string>& sizes, const std::string& queries,
              double in_set_fraction, unsigned reps, const std::string& out,
              const std::string& figures) {
  std::vector<bench::BenchReport> reports;
  for (const auto& name : filters) {
    for (const auto& size : sizes) {
      auto config = opts.config(parse_kind(name), parse_count(size));
      config.query_count = parse_count(queries);
      config.in_set_fraction = in_set_fraction;
      config.repetitions = reps;
      const auto report = bench::run_bench(config);
      std::cerr << to_string(report.kind) << " n=" << report.n
                << " construction_ns_per_key=" << report.construction_ns_per_key
                << " query_ns_per_key=" << report.query_ns_per_key
                << " matches=" << report.matches << " fpp=" << report.measured_fpp
                << " bits_per_key=" << report.bits_per_key << '\n';
      reports.push_back(report);
    }
  }
  if (out.empty()) {
    bench::emit_report(reports, std::cout);
  } else {
    bench::emit_report(reports, std::filesystem::path(out));
  }
  if (!figures.empty()) bench::write_figure_data(reports, figures);
  return kOk;
}

int run_theory(unsigned min_bits, unsigned max_bits, const std::string& out) {
  if (min_bits > max_bits) throw ConfigurationError("--min-bits exceeds --max-bits");
  if (out.empty()) {
    bench::write_theory_table(std::cout, min_bits, max_bits);
    return kOk;
  }
  std::ofstream file(out);
  if (!file) throw IoError("cannot open " + out + " for writing");
  bench::write_theory_table(file, min_bits, max_bits);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binary fuse filter toolkit and benchmark"};
  app.require_subcommand(1);

  FilterOptions build_opts;
  std::string build_n = "1000000";
  std::string build_keys;
  std::string build_out;
  auto* build = app.add_subcommand("build", "Construct a filter and write it to a file");
  build_opts.add_to(*build);
  build->add_option("--n", build_n, "Number of generated keys")->capture_default_str();
  build->add_option("--keys", build_keys, "Read keys (one integer per token) from this file");
  build->add_option("--out", build_out, "Output filter file")->required();

  std::string query_in;
  auto* query = app.add_subcommand("query", "Probe keys read from standard input");
  query->add_option("--in", query_in, "Filter file written by `build`")->required();

  FilterOptions fpp_opts;
  std::string fpp_n = "1000000";
  std::string fpp_queries = "10000000";
  auto* fpp = app.add_subcommand("fpp", "Measure the false-positive rate on random non-members");
  fpp_opts.add_to(*fpp);
  fpp->add_option("--n", fpp_n, "Set size")->capture_default_str();
  fpp->add_option("--queries", fpp_queries, "Non-member queries (at least 1e6)")
      ->capture_default_str();

  FilterOptions bench_opts;
  std::vector<std::string> bench_filters = {"fuse3", "fuse4", "xor", "bloom"};
  std::vector<std::string> bench_sizes = {"1e6"};
  std::string bench_queries = "1e7";
  double bench_fraction = 0.25;
  unsigned bench_reps = 3;
  std::string bench_out;
  std::string bench_figures;
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark sweep, CSV report");
  bench_opts.add_to(*bench_cmd);
  bench_cmd->remove_option(bench_cmd->get_option("--filter"));
  bench_cmd->add_option("--filter", bench_filters, "Filters to benchmark")->capture_default_str();
  bench_cmd->add_option("--n", bench_sizes, "Set sizes")->capture_default_str();
  bench_cmd->add_option("--queries", bench_queries, "Query set size")->capture_default_str();
  bench_cmd->add_option("--in-set-fraction", bench_fraction, "Fraction of member queries")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  bench_cmd->add_option("--reps", bench_reps, "Timed repetitions (odd)")->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "CSV output file (default: stdout)");
  bench_cmd->add_option("--figures", bench_figures, "Directory for per-figure data files");

  unsigned min_bits = 8;
  unsigned max_bits = 16;
  std::string theory_out;
  auto* theory = app.add_subcommand("report-theory", "Theoretical bits per key for eps = 2^-bits");
  theory->add_option("--min-bits", min_bits)->check(CLI::Range(1u, 64u))->capture_default_str();
  theory->add_option("--max-bits", max_bits)->check(CLI::Range(1u, 64u))->capture_default_str();
  theory->add_option("--out", theory_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadArguments;
  }

  try {
    if (*build) return run_build(build_opts, build_n, build_keys, build_out);
    if (*query) return run_query(query_in);
    if (*fpp) return run_fpp(fpp_opts, fpp_n, fpp_queries);
    if (*bench_cmd) {
      return run_bench(bench_opts, bench_filters, bench_sizes, bench_queries, bench_fraction,
                       bench_reps, bench_out, bench_figures);
    }
    if (*theory) return run_theory(min_bits, max_bits, theory_out);
  } catch (const ConstructionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConstructionFailed;
  } catch (const ConfigurationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid number: " << e.what() << '\n';
    return kBadArguments;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kBadArguments;
}
