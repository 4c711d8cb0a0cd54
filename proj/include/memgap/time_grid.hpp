#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "memgap/errors.hpp"

namespace memgap {

inline constexpr double kAlignTol = 1e-9;

/// Uniform time grid with nodes t_start + j*dt, j = 0..n_steps.
///
/// Times that are supposed to be nodes (delays, gap multiples, aggregation
/// endpoints) are resolved through index_of(), which refuses off-node times
/// instead of rounding them.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, double dt) : t_start_(t_start), dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("TimeGrid: dt must be positive");
    if (!(t_end > t_start)) throw ConfigError("TimeGrid: t_end must exceed t_start");
    const double steps = (t_end - t_start) / dt;
    const auto n = static_cast<long long>(std::llround(steps));
    if (n < 1 || std::abs(steps - static_cast<double>(n)) > kAlignTol * std::max(1.0, steps))
      throw ConfigError("TimeGrid: (t_end - t_start)/dt must be an integer");
    n_steps_ = static_cast<std::size_t>(n);
  }

  double t_start() const { return t_start_; }
  double t_end() const { return t_start_ + static_cast<double>(n_steps_) * dt_; }
  double dt() const { return dt_; }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t n_nodes() const { return n_steps_ + 1; }

  double node_time(std::size_t j) const { return t_start_ + static_cast<double>(j) * dt_; }

  /// Fractional node coordinate (t - t_start)/dt; no domain check.
  double position(double t) const { return (t - t_start_) / dt_; }

  bool contains(double t) const {
    const double p = position(t);
    return p >= -kAlignTol && p <= static_cast<double>(n_steps_) + kAlignTol;
  }

  bool is_aligned(double t) const {
    const double p = position(t);
    const double r = std::round(p);
    return std::abs(p - r) <= kAlignTol * std::max(1.0, std::abs(p)) && r >= -0.5 &&
           r <= static_cast<double>(n_steps_) + 0.5;
  }

  /// Index of the node at time t; throws AlignmentError if t is off-node.
  std::size_t index_of(double t) const {
    const double p = position(t);
    const auto j = static_cast<long long>(std::llround(p));
    if (j < 0 || j > static_cast<long long>(n_steps_) ||
        std::abs(p - static_cast<double>(j)) > kAlignTol * std::max(1.0, std::abs(p)))
      throw AlignmentError("time " + std::to_string(t) + " is not a grid node");
    return static_cast<std::size_t>(j);
  }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.t_start_ == b.t_start_ && a.dt_ == b.dt_ && a.n_steps_ == b.n_steps_;
  }

 private:
  double t_start_;
  double dt_;
  std::size_t n_steps_;
};

}  // namespace memgap
