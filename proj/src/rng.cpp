#include "sfflab/rng.hpp"

namespace sfflab {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SeedSpec::stream_key() const {
  return mix64(mix64(master_seed) ^ mix64(stream_index ^ 0x632be59bd9b4e019ULL));
}

Engine make_engine(const SeedSpec& seed) { return Engine(seed.stream_key()); }

}  // namespace sfflab
