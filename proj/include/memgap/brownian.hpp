#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "memgap/errors.hpp"
#include "memgap/rng.hpp"
#include "memgap/time_grid.hpp"

namespace memgap {

/// m-dimensional Wiener increments on a uniform grid over [0, T].
///
/// Increments are generated once on the finest grid of an experiment and
/// summed upward to coarser evaluation grids, so runs with different gap
/// sizes see the same driving noise (common random numbers).
class BrownianPath {
 public:
  BrownianPath(TimeGrid grid, std::size_t dims, std::vector<double> increments)
      : grid_(grid), dims_(dims), increments_(std::move(increments)) {
    if (dims_ == 0) throw ConfigError("BrownianPath: dims must be positive");
    if (increments_.size() != grid_.n_steps() * dims_)
      throw ConfigError("BrownianPath: increment count does not match grid");
  }

  const TimeGrid& grid() const { return grid_; }
  std::size_t dims() const { return dims_; }
  const std::vector<double>& increments() const { return increments_; }

  std::span<const double> increment(std::size_t step) const {
    return std::span<const double>(increments_).subspan(step * dims_, dims_);
  }

  /// Exact sum of fine increments over steps [i0, i1).
  void aggregate_steps(std::size_t i0, std::size_t i1, std::span<double> out) const {
    if (i0 > i1 || i1 > grid_.n_steps()) throw DomainError("aggregate_steps: bad step range");
    for (std::size_t c = 0; c < dims_; ++c) out[c] = 0.0;
    for (std::size_t j = i0; j < i1; ++j) {
      const auto inc = increment(j);
      for (std::size_t c = 0; c < dims_; ++c) out[c] += inc[c];
    }
  }

  /// Aggregated increment over [a, b]; endpoints must be grid nodes.
  void aggregate(double a, double b, std::span<double> out) const {
    if (b < a) throw DomainError("aggregate: b < a");
    aggregate_steps(grid_.index_of(a), grid_.index_of(b), out);
  }

  std::vector<double> aggregate(double a, double b) const {
    std::vector<double> out(dims_);
    aggregate(a, b, out);
    return out;
  }

 private:
  TimeGrid grid_;
  std::size_t dims_;
  std::vector<double> increments_;
};

/// Generates Wiener increments on `grid`; reproducible per SeedSpec.
inline BrownianPath generate_brownian(const TimeGrid& grid, std::size_t dims,
                                      const SeedSpec& seed) {
  if (dims == 0) throw ConfigError("generate_brownian: dims must be positive");
  if (grid.n_steps() < 1) throw ConfigError("generate_brownian: degenerate grid");
  if (seed.tag != StreamTag::brownian)
    throw ConfigError("generate_brownian requires the brownian stream tag");
  auto engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(grid.dt());
  std::vector<double> inc(grid.n_steps() * dims);
  for (double& v : inc) v = sd * normal(engine);
  return BrownianPath(grid, dims, std::move(inc));
}

/// Re-expresses the path on a coarser nested grid by exact block sums.
inline BrownianPath coarsen(const BrownianPath& path, double dt_coarse) {
  const double ratio = dt_coarse / path.grid().dt();
  const auto r = static_cast<long long>(std::llround(ratio));
  if (r < 1 || std::abs(ratio - static_cast<double>(r)) > kAlignTol * std::max(1.0, ratio))
    throw AlignmentError("coarsen: dt_coarse is not a multiple of the fine step");
  const auto stride = static_cast<std::size_t>(r);
  if (path.grid().n_steps() % stride != 0)
    throw AlignmentError("coarsen: coarse grid does not cover [0, T] evenly");
  const std::size_t m = path.dims();
  const std::size_t n = path.grid().n_steps() / stride;
  std::vector<double> inc(n * m);
  for (std::size_t j = 0; j < n; ++j)
    path.aggregate_steps(j * stride, (j + 1) * stride,
                         std::span<double>(inc).subspan(j * m, m));
  TimeGrid grid(path.grid().t_start(), path.grid().t_end(), dt_coarse);
  return BrownianPath(grid, m, std::move(inc));
}

// ---------------------------------------------------------------------------
// Binary increment dump for cross-implementation replay.
// Layout (little endian): u64 m, f64 dt_fine, u64 n_steps,
// u64 experiment_seed, u64 path_index, u64 stream_tag, then n_steps*m f64
// increments in row-major order.
// ---------------------------------------------------------------------------

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "increment dump assumes a little-endian host");

template <class T>
void write_raw(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw DomainError("increment dump: truncated stream");
  return v;
}

}  // namespace detail

inline void write_increment_dump(const BrownianPath& path, const SeedSpec& seed,
                                 std::ostream& os) {
  detail::write_raw<std::uint64_t>(os, path.dims());
  detail::write_raw<double>(os, path.grid().dt());
  detail::write_raw<std::uint64_t>(os, path.grid().n_steps());
  detail::write_raw<std::uint64_t>(os, seed.experiment_seed);
  detail::write_raw<std::uint64_t>(os, seed.path_index);
  detail::write_raw<std::uint64_t>(os, static_cast<std::uint64_t>(seed.tag));
  os.write(reinterpret_cast<const char*>(path.increments().data()),
           static_cast<std::streamsize>(path.increments().size() * sizeof(double)));
}

inline BrownianPath read_increment_dump(std::istream& is, SeedSpec* seed_out = nullptr) {
  const auto m = detail::read_raw<std::uint64_t>(is);
  const auto dt = detail::read_raw<double>(is);
  const auto n = detail::read_raw<std::uint64_t>(is);
  SeedSpec seed;
  seed.experiment_seed = detail::read_raw<std::uint64_t>(is);
  seed.path_index = detail::read_raw<std::uint64_t>(is);
  seed.tag = static_cast<StreamTag>(detail::read_raw<std::uint64_t>(is));
  if (seed_out != nullptr) *seed_out = seed;
  std::vector<double> inc(n * m);
  is.read(reinterpret_cast<char*>(inc.data()),
          static_cast<std::streamsize>(inc.size() * sizeof(double)));
  if (!is) throw DomainError("increment dump: truncated stream");
  TimeGrid grid(0.0, static_cast<double>(n) * dt, dt);
  return BrownianPath(grid, m, std::move(inc));
}

}  // namespace memgap
