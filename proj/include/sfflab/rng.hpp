#pragma once

// Counter-style seeding: every (master seed, stream index) pair maps to its own
// engine, and sub-streams are derived by hashing, so no RNG state is ever
// shared between realizations or time steps.

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace sfflab {

using Engine = std::mt19937_64;

/// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// 64-bit key identifying this stream.
  std::uint64_t stream_key() const;
  /// Independent child stream, e.g. one per time step of a realization.
  SeedSpec substream(std::uint64_t index) const { return {stream_key(), index}; }

  bool operator==(const SeedSpec&) const = default;
};

Engine make_engine(const SeedSpec& seed);

/// Standard normal variates (ziggurat).
class NormalSource {
 public:
  explicit NormalSource(const SeedSpec& seed) : engine_(make_engine(seed)) {}
  double operator()() { return dist_(engine_); }

 private:
  Engine engine_;
  boost::random::normal_distribution<double> dist_;
};

}  // namespace sfflab
