#pragma once

// Experiment configuration shared by all subcommands, with a TOML mirror of
// the field names. Command-line flags override values read from a file.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sfflab::cli {

struct RunConfig {
  std::string kind = "dbm";  // process (dbm, cauchy) or ensemble (poisson, haar)
  std::string model = "scaling";
  long long N = 16;
  double dt = 0.01;
  std::uint64_t steps = 1000;
  std::uint64_t realizations = 1000;
  std::vector<double> t_grid{0.5, 1.0, 2.0};
  std::vector<double> a_grid{0.0, 0.3, 0.6, 0.9};
  int n_max = 32;
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0: machine parallelism
  std::string out = ".";
  std::string unfold = "none";
  std::string dbm_density = "empirical";
  int bins = 64;
  int grid = 512;
  std::vector<std::uint64_t> snapshots{10, 100, 1000};
  bool dump_spectra = false;

  bool operator==(const RunConfig&) const = default;

  std::string to_toml() const;
  /// Reads keys over the current values and returns the keys it set;
  /// unknown keys are an error.
  std::vector<std::string> merge_toml(std::istream& in);
  static RunConfig from_toml(std::istream& in);

  /// (key, value) pairs in TOML spelling, for CSV header blocks.
  std::vector<std::pair<std::string, std::string>> entries() const;

  /// Stable 64-bit FNV-1a hash of to_toml().
  std::uint64_t hash() const;
};

/// Shortest text that reads back to the same double.
std::string format_double(double v);

}  // namespace sfflab::cli
