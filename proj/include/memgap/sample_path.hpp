#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memgap/errors.hpp"
#include "memgap/time_grid.hpp"

namespace memgap {

using Vec = std::vector<double>;

/// Non-owning window over the first n_valid nodes of a path buffer.
///
/// Evaluation between nodes is by linear interpolation, which is the path
/// representative everywhere in this library: segments stay continuous and
/// the sup norm is exact (the Euclidean norm of an affine function is convex
/// on each cell, so maxima sit on nodes or window endpoints).
class PathView {
 public:
  PathView(const TimeGrid& grid, std::span<const double> data, std::size_t dim,
           std::size_t n_valid)
      : grid_(&grid), data_(data), dim_(dim), n_valid_(n_valid) {
    if (dim_ == 0) throw ConfigError("PathView: dim must be positive");
    if (n_valid_ == 0 || n_valid_ > grid.n_nodes() || data.size() < n_valid_ * dim_)
      throw DomainError("PathView: invalid node window");
  }

  const TimeGrid& grid() const { return *grid_; }
  std::size_t dim() const { return dim_; }
  std::size_t n_valid() const { return n_valid_; }
  double valid_end_time() const { return grid_->node_time(n_valid_ - 1); }

  std::span<const double> node(std::size_t j) const {
    if (j >= n_valid_) throw DomainError("PathView: node index beyond valid window");
    return data_.subspan(j * dim_, dim_);
  }

  void value_at(double t, std::span<double> out) const {
    const double p = grid_->position(t);
    const double r = std::round(p);
    const double snap_tol = kAlignTol * std::max(1.0, std::abs(p));
    if (std::abs(p - r) <= snap_tol) {
      const auto j = static_cast<long long>(r);
      if (j < 0 || j >= static_cast<long long>(n_valid_))
        throw DomainError("path evaluation at t=" + std::to_string(t) + " outside domain");
      const auto v = node(static_cast<std::size_t>(j));
      for (std::size_t i = 0; i < dim_; ++i) out[i] = v[i];
      return;
    }
    const double fl = std::floor(p);
    const auto j = static_cast<long long>(fl);
    if (j < 0 || j + 1 >= static_cast<long long>(n_valid_))
      throw DomainError("path evaluation at t=" + std::to_string(t) + " outside domain");
    const double w = p - fl;
    const auto lo = node(static_cast<std::size_t>(j));
    const auto hi = node(static_cast<std::size_t>(j) + 1);
    for (std::size_t i = 0; i < dim_; ++i) out[i] = (1.0 - w) * lo[i] + w * hi[i];
  }

  Vec value_at(double t) const {
    Vec out(dim_);
    value_at(t, out);
    return out;
  }

  double scalar_at(double t) const {
    if (dim_ != 1) throw DomainError("scalar_at requires dim == 1");
    double out;
    value_at(t, std::span<double>(&out, 1));
    return out;
  }

 private:
  const TimeGrid* grid_;
  std::span<const double> data_;
  std::size_t dim_;
  std::size_t n_valid_;
};

/// One realized trajectory on a uniform grid, immutable after construction.
class SamplePath {
 public:
  SamplePath(TimeGrid grid, std::size_t dim, std::vector<double> values)
      : grid_(grid), dim_(dim), values_(std::move(values)) {
    if (dim_ == 0) throw ConfigError("SamplePath: dim must be positive");
    if (values_.size() != grid_.n_nodes() * dim_)
      throw ConfigError("SamplePath: value count does not match grid");
    for (double v : values_)
      if (!std::isfinite(v)) throw DomainError("SamplePath: non-finite value");
  }

  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  const std::vector<double>& values() const { return values_; }

  std::span<const double> node(std::size_t j) const {
    return std::span<const double>(values_).subspan(j * dim_, dim_);
  }

  PathView view() const { return PathView(grid_, values_, dim_, grid_.n_nodes()); }

  Vec value(double t) const { return view().value_at(t); }
  double scalar(double t) const { return view().scalar_at(t); }

 private:
  TimeGrid grid_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// Windowed view of a path at anchor time t: eval(v) = path(t + v) for
/// v in [-delay, 0], continuous by construction.
class Segment {
 public:
  Segment(PathView view, double anchor, double delay)
      : view_(std::move(view)), anchor_(anchor), delay_(delay) {
    if (delay_ < 0.0) throw ConfigError("Segment: negative delay");
    const TimeGrid& g = view_.grid();
    const double tol = kAlignTol * std::max(1.0, std::abs(anchor_));
    if (anchor_ - delay_ < g.t_start() - tol || anchor_ > view_.valid_end_time() + tol)
      throw DomainError("segment window [t-L, t] not covered by path");
  }

  double anchor() const { return anchor_; }
  double delay() const { return delay_; }
  std::size_t dim() const { return view_.dim(); }
  const TimeGrid& grid() const { return view_.grid(); }
  const PathView& path() const { return view_; }

  void eval(double v, std::span<double> out) const {
    if (v < -delay_ - kAlignTol || v > kAlignTol)
      throw DomainError("segment evaluated outside [-L, 0]");
    view_.value_at(clamp_time(anchor_ + v), out);
  }

  Vec eval(double v) const {
    Vec out(dim());
    eval(v, out);
    return out;
  }

  double scalar(double v) const {
    double out;
    eval(v, std::span<double>(&out, 1));
    return out;
  }

  /// Grid nodes covered by the window, as [first_node, last_node] indices.
  std::pair<std::size_t, std::size_t> covered_nodes() const {
    const TimeGrid& g = view_.grid();
    const double lo = g.position(anchor_ - delay_);
    const double hi = g.position(anchor_);
    auto first = static_cast<long long>(std::ceil(lo - kAlignTol * std::max(1.0, std::abs(lo))));
    auto last = static_cast<long long>(std::floor(hi + kAlignTol * std::max(1.0, std::abs(hi))));
    first = std::max(first, 0ll);
    last = std::min(last, static_cast<long long>(view_.n_valid()) - 1);
    return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
  }

 private:
  double clamp_time(double t) const {
    // guard the window endpoints against roundoff; interior times pass through
    const double lo = anchor_ - delay_;
    if (t < lo) return lo;
    if (t > anchor_) return anchor_;
    return t;
  }

  PathView view_;
  double anchor_;
  double delay_;
};

inline Segment segment_at(const PathView& view, double t, double delay) {
  return Segment(view, t, delay);
}

inline Segment segment_at(const SamplePath& path, double t, double delay) {
  return Segment(path.view(), t, delay);
}

namespace detail {

inline double euclid_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace detail

/// Supremum of |eval| over [-L, 0]. Exact for the piecewise-linear
/// representative: max over covered nodes and the two window endpoints.
inline double sup_norm(const Segment& seg) {
  Vec buf(seg.dim());
  std::span<double> out(buf);
  seg.eval(-seg.delay(), out);
  double best = detail::euclid_norm(buf);
  seg.eval(0.0, out);
  best = std::max(best, detail::euclid_norm(buf));
  const auto [first, last] = seg.covered_nodes();
  for (std::size_t j = first; j <= last; ++j)
    best = std::max(best, detail::euclid_norm(seg.path().node(j)));
  return best;
}

}  // namespace memgap
