#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "memgap/brownian.hpp"
#include "memgap/errors.hpp"
#include "memgap/sample_path.hpp"
#include "memgap/time_grid.hpp"

namespace memgap {

/// Dense polynomial in ascending powers. Just enough algebra for exact
/// method-of-steps integration of linear point-delay equations.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
  }
  static Polynomial constant(double c) { return Polynomial({c}); }

  double operator()(double t) const {
    double acc = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * t + coeffs_[i];
    return acc;
  }

  Polynomial antiderivative() const {
    std::vector<double> out(coeffs_.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      out[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
    return Polynomial(std::move(out));
  }

  /// p(t + c), expanded (Taylor shift).
  Polynomial shifted(double c) const {
    std::vector<double> out(coeffs_.size(), 0.0);
    for (std::size_t i = coeffs_.size(); i-- > 0;) {
      for (std::size_t j = out.size(); j-- > 1;) out[j] = out[j] * c + out[j - 1];
      out[0] = out[0] * c + coeffs_[i];
    }
    return Polynomial(std::move(out));
  }

  Polynomial scaled(double a) const {
    std::vector<double> out = coeffs_;
    for (double& v : out) v *= a;
    return Polynomial(std::move(out));
  }

  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

/// x'(t) = coefficient * x(t - delay) on [0, T], x = theta on [-delay, 0].
struct DdeOracleSpec {
  double coefficient = 1.0;
  double delay = 1.0;
  Polynomial theta = Polynomial::constant(1.0);
};

namespace detail {

/// Exact method of steps: per interval [nL, (n+1)L] the solution is the
/// polynomial q_n(s) = q_n(0) + c * int_0^s q_{n-1}, s = t - nL.
inline std::vector<Polynomial> dde_pieces(const DdeOracleSpec& spec, double horizon) {
  if (!(spec.delay > 0.0)) throw ConfigError("dde oracle requires delay > 0");
  if (!(horizon > 0.0)) throw ConfigError("dde oracle requires a positive horizon");
  const auto n_pieces =
      static_cast<std::size_t>(std::ceil(horizon / spec.delay - kAlignTol));
  std::vector<Polynomial> pieces;
  pieces.reserve(n_pieces);
  Polynomial prev = spec.theta.shifted(-spec.delay);  // q_{-1}(s) = theta(s - L)
  double left_value = spec.theta(0.0);
  for (std::size_t n = 0; n < n_pieces; ++n) {
    std::vector<double> coeffs = prev.antiderivative().scaled(spec.coefficient).coeffs();
    coeffs[0] += left_value;
    pieces.emplace_back(std::move(coeffs));
    left_value = pieces.back()(spec.delay);
    prev = pieces.back();
  }
  return pieces;
}

}  // namespace detail

/// Exact solution value at time t (t <= 0 reads theta).
inline double dde_oracle_value(const DdeOracleSpec& spec, double t) {
  if (t <= 0.0) return spec.theta(t);
  const auto pieces = detail::dde_pieces(spec, t);
  auto idx = static_cast<std::size_t>(std::floor(t / spec.delay + kAlignTol));
  if (idx >= pieces.size()) idx = pieces.size() - 1;
  return pieces[idx](t - static_cast<double>(idx) * spec.delay);
}

/// Trapezoidal method-of-steps at step h (independent numeric route).
inline std::vector<double> dde_oracle_numeric(const DdeOracleSpec& spec, double horizon,
                                              double h) {
  const double ln = spec.delay / h;
  const auto lag = static_cast<std::size_t>(std::llround(ln));
  if (lag < 1 || std::abs(ln - static_cast<double>(lag)) > kAlignTol * std::max(1.0, ln))
    throw ConfigError("dde_oracle_numeric: delay must be a multiple of the step");
  const auto n = static_cast<std::size_t>(std::llround(horizon / h));
  std::vector<double> x(n + lag + 1);
  for (std::size_t j = 0; j <= lag; ++j)
    x[j] = spec.theta(-spec.delay + static_cast<double>(j) * h);
  const double c = spec.coefficient;
  for (std::size_t j = lag; j < n + lag; ++j)
    x[j + 1] = x[j] + 0.5 * h * c * (x[j - lag] + x[j + 1 - lag]);
  return std::vector<double>(x.begin() + static_cast<long>(lag), x.end());
}

/// Reference solution on [-L, T] sampled at dt_out, with a built-in
/// self-check: the exact polynomial route must agree with Richardson-
/// extrapolated trapezoidal integration to 1e-10.
inline SamplePath dde_oracle(const DdeOracleSpec& spec, double horizon, double dt_out) {
  const auto pieces = detail::dde_pieces(spec, horizon);
  const TimeGrid grid(-spec.delay, horizon, dt_out);
  std::vector<double> values(grid.n_nodes());
  for (std::size_t j = 0; j < grid.n_nodes(); ++j) {
    const double t = grid.node_time(j);
    if (t <= 0.0) {
      values[j] = spec.theta(t);
    } else {
      auto idx = static_cast<std::size_t>(std::floor(t / spec.delay + kAlignTol));
      if (idx >= pieces.size()) idx = pieces.size() - 1;
      values[j] = pieces[idx](t - static_cast<double>(idx) * spec.delay);
    }
  }

  // cross-check against the numeric route on a coarse probe grid
  {
    const double h = spec.delay / 512.0;
    const auto full = dde_oracle_numeric(spec, horizon, h);
    const auto half = dde_oracle_numeric(spec, horizon, h / 2.0);
    const auto n_check = static_cast<std::size_t>(std::llround(horizon / spec.delay * 8.0));
    for (std::size_t i = 1; i <= n_check; ++i) {
      const double t = horizon * static_cast<double>(i) / static_cast<double>(n_check);
      const auto j = static_cast<std::size_t>(std::llround(t / h));
      const double richardson = (4.0 * half[2 * j] - full[j]) / 3.0;
      const double exact = dde_oracle_value(spec, t);
      if (std::abs(exact - richardson) > 1e-10 * std::max(1.0, std::abs(exact)))
        throw std::logic_error("dde oracle self-check failed at t=" + std::to_string(t));
    }
  }
  return SamplePath(grid, 1, std::move(values));
}

/// Closed-form geometric Brownian motion x0*exp((mu - sigma^2/2)t + sigma W(t))
/// evaluated at the nodes of `grid` ([0, T]) with W aggregated from `w`.
inline std::vector<double> gbm_exact_nodes(double x0, double mu, double sigma,
                                           const TimeGrid& grid, const BrownianPath& w) {
  if (w.dims() != 1) throw ConfigError("gbm_exact_nodes: needs a scalar Brownian path");
  const auto stride =
      static_cast<std::size_t>(std::llround(grid.dt() / w.grid().dt()));
  if (std::abs(grid.dt() - static_cast<double>(stride) * w.grid().dt()) >
      kAlignTol * grid.dt())
    throw AlignmentError("gbm_exact_nodes: grids are not nested");
  std::vector<double> out(grid.n_nodes());
  double wt = 0.0;
  double acc[1] = {0.0};
  out[0] = x0;
  for (std::size_t j = 1; j < grid.n_nodes(); ++j) {
    w.aggregate_steps((j - 1) * stride, j * stride, std::span<double>(acc, 1));
    wt += acc[0];
    const double t = grid.node_time(j);
    out[j] = x0 * std::exp((mu - 0.5 * sigma * sigma) * t + sigma * wt);
  }
  return out;
}

}  // namespace memgap
