#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "memgap/errors.hpp"

namespace memgap {

/// Streaming (count, sum, sum-of-squares) accumulator with associative merge,
/// so Monte Carlo reductions can run per-worker and fold in a fixed order.
struct RunningMoments {
  std::size_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }

  void merge(const RunningMoments& other) {
    n += other.n;
    sum += other.sum;
    sum_sq += other.sum_sq;
  }

  double mean() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }

  double variance() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double v = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return v > 0.0 ? v : 0.0;
  }

  double std_error() const {
    return n == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n));
  }

  /// 95% CLT half-width.
  double half_width() const { return 1.959963984540054 * std_error(); }
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_line: need >= 2 points");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ConfigError("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.intercept + fit.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

inline LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw ConfigError("fit_loglog: inputs must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

}  // namespace memgap
