#pragma once

#include <cstdint>
#include <random>

#include "memgap/errors.hpp"

namespace memgap {

/// Which logical random stream a seed addresses. Distinct tags give
/// statistically independent streams for the same (seed, path) pair, so the
/// initial process is independent of the Brownian driver.
enum class StreamTag : std::uint64_t { brownian = 1, initial = 2 };

/// Addresses one reproducible random stream: the generator state is a pure
/// function of the three fields, so workers never share mutable RNG state.
struct SeedSpec {
  std::uint64_t experiment_seed = 0;
  std::uint64_t path_index = 0;
  StreamTag tag = StreamTag::brownian;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Derives a generator from a SeedSpec. Pure: same spec, same stream.
inline std::mt19937_64 make_engine(const SeedSpec& spec) {
  std::uint64_t h = detail::splitmix64(spec.experiment_seed);
  h = detail::splitmix64(h ^ spec.path_index);
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(spec.tag));
  return std::mt19937_64(h);
}

}  // namespace memgap
