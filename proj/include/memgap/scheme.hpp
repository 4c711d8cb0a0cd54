#pragma once

#include <cmath>
#include <cstddef>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#include "memgap/brownian.hpp"
#include "memgap/errors.hpp"
#include "memgap/initial.hpp"
#include "memgap/model.hpp"
#include "memgap/sample_path.hpp"
#include "memgap/time_grid.hpp"

namespace memgap {

enum class SchemeVariant { standard, alternative };

/// Discretization of one memory-gap run.
///
/// The gap parameter k sets the lag 1/k of every functional argument;
/// `substeps` refines each gap interval into r integration steps of length
/// 1/(k*r), so the gap size and the quadrature resolution vary independently.
struct SchemeConfig {
  std::size_t gap_k = 1;
  std::size_t substeps = 8;
  double horizon = 1.0;
  SchemeVariant variant = SchemeVariant::standard;

  double gap() const { return 1.0 / static_cast<double>(gap_k); }
  double dt() const { return 1.0 / static_cast<double>(gap_k * substeps); }
};

namespace detail {

inline void validate_scheme_inputs(const SfdeModel& model, const SchemeConfig& config,
                                   const BrownianPath& brownian) {
  if (config.gap_k < 1) throw ConfigError("scheme: gap parameter k must be >= 1");
  if (config.substeps < 1) throw ConfigError("scheme: substeps must be >= 1");
  if (!(config.horizon > 0.0)) throw ConfigError("scheme: horizon must be positive");
  const double tk = config.horizon * static_cast<double>(config.gap_k);
  if (std::abs(tk - std::round(tk)) > kAlignTol * std::max(1.0, tk))
    throw ConfigError("scheme: horizon must be an integer multiple of the gap 1/k");
  const double dt = config.dt();
  const double ln = model.delay / dt;
  if (std::abs(ln - std::round(ln)) > kAlignTol * std::max(1.0, ln))
    throw ConfigError("scheme: delay L must sit on the sub-step grid");
  if (model.state_dim == 0 || model.noise_dim == 0)
    throw ConfigError("scheme: model dimensions must be positive");
  if (brownian.dims() != model.noise_dim)
    throw ConfigError("scheme: Brownian dimension does not match the model");
  if (std::abs(brownian.grid().t_start()) > kAlignTol)
    throw ConfigError("scheme: Brownian grid must start at 0");
  if (brownian.grid().t_end() < config.horizon - kAlignTol)
    throw ConfigError("scheme: Brownian path does not cover [0, T]");
  const double ratio = dt / brownian.grid().dt();
  const auto r = static_cast<long long>(std::llround(ratio));
  if (r < 1 || std::abs(ratio - static_cast<double>(r)) > kAlignTol * std::max(1.0, ratio))
    throw AlignmentError("scheme: sub-step is not a multiple of the Brownian step");
}

inline bool finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline SamplePath integrate_gap_scheme(const SfdeModel& model, const SchemeConfig& config,
                                       const BrownianPath& brownian, const InitialFn& theta) {
  validate_scheme_inputs(model, config, brownian);
  const std::size_t d = model.state_dim;
  const std::size_t m = model.noise_dim;
  const double dt = config.dt();
  const double L = model.delay;
  const std::size_t r = config.substeps;
  const TimeGrid grid(-1.0 - L, config.horizon, dt);
  const std::size_t j0 = grid.index_of(0.0);

  std::vector<double> values(grid.n_nodes() * d);
  InitialFn hat = extend_initial(theta, L);
  for (std::size_t j = 0; j <= j0; ++j) {
    const double t = j == j0 ? 0.0 : grid.node_time(j);
    std::span<double> out(values.data() + j * d, d);
    hat(t, out);
    if (!finite(out))
      throw ConfigError("initial function produced a non-finite value at t=" +
                        std::to_string(t));
  }

  const auto wstride =
      static_cast<std::size_t>(std::llround(dt / brownian.grid().dt()));
  const bool shift_time = config.variant == SchemeVariant::alternative;
  Vec fbuf(d), gbuf(d * m), dw(m);
  for (std::size_t j = j0; j + 1 < grid.n_nodes(); ++j) {
    // integrands over [n/k, (n+1)/k) are anchored at times <= n/k; restricting
    // the view to the interval start makes that adaptedness structural
    const std::size_t interval_start = j0 + ((j - j0) / r) * r;
    const PathView view(grid, std::span<const double>(values.data(), (interval_start + 1) * d),
                        d, interval_start + 1);
    const double anchor = grid.node_time(j - r);
    const Segment seg(view, anchor, L);
    const double u = grid.node_time(j);
    const double t_eval = shift_time ? anchor : u;
    model.drift(t_eval, seg, fbuf);
    model.diffusion(t_eval, seg, gbuf);
    if (!finite(fbuf) || !finite(gbuf))
      throw ModelError("model functional returned a non-finite value at t=" +
                       std::to_string(u));
    brownian.aggregate_steps((j - j0) * wstride, (j + 1 - j0) * wstride, dw);
    double* next = values.data() + (j + 1) * d;
    const double* prev = values.data() + j * d;
    for (std::size_t i = 0; i < d; ++i) {
      double acc = prev[i] + fbuf[i] * dt;
      for (std::size_t c = 0; c < m; ++c) acc += gbuf[i * m + c] * dw[c];
      next[i] = acc;
    }
    if (!finite(std::span<const double>(next, d)))
      throw ModelError("scheme state became non-finite at t=" + std::to_string(u + dt));
  }
  return SamplePath(grid, d, std::move(values));
}

}  // namespace detail

/// Forward integration of the memory-gap scheme on [-1-L, T].
///
/// The output equals hat-theta on [-1-L, 0] exactly. On [0, T] each sub-step
/// advances x(u + dt) = x(u) + F(u, x_{u-1/k}) dt + G(u, x_{u-1/k}) dW, with
/// left-endpoint (Ito) evaluation of the Wiener integral; the lagged anchor
/// keeps every functional argument fully determined one gap interval ahead.
inline SamplePath solve_memory_gap(const SfdeModel& model, const SchemeConfig& config,
                                   const BrownianPath& brownian, const InitialFn& theta) {
  SchemeConfig c = config;
  c.variant = SchemeVariant::standard;
  return detail::integrate_gap_scheme(model, c, brownian, theta);
}

/// Same stepping with both functionals evaluated at the shifted time u - 1/k.
/// Meaningful only for models regular enough in t; that condition is not
/// machine-checkable, so an undeclared model only triggers a warning.
inline SamplePath solve_alternative(const SfdeModel& model, const SchemeConfig& config,
                                    const BrownianPath& brownian, const InitialFn& theta) {
  if (!model.declared_time_regular)
    std::cerr << "memgap: warning: alternative scheme on model '" << model.name
              << "' which does not declare time regularity\n";
  SchemeConfig c = config;
  c.variant = SchemeVariant::alternative;
  return detail::integrate_gap_scheme(model, c, brownian, theta);
}

/// L = 0 reduction: functional arguments collapse to the lagged point value
/// x(u - 1/k). Implemented as its own stepping loop (point segments, direct
/// lagged reads) so the reduction can be cross-checked against the general
/// solver.
inline SamplePath reduce_sode(const SfdeModel& model, const SchemeConfig& config,
                              const BrownianPath& brownian, const InitialFn& theta) {
  if (model.delay != 0.0) throw ConfigError("reduce_sode requires a model with L = 0");
  detail::validate_scheme_inputs(model, config, brownian);
  const std::size_t d = model.state_dim;
  const std::size_t m = model.noise_dim;
  const double dt = config.dt();
  const TimeGrid grid(-1.0, config.horizon, dt);
  const std::size_t j0 = grid.index_of(0.0);
  const std::size_t r = config.substeps;

  std::vector<double> values(grid.n_nodes() * d);
  Vec x0(d);
  theta(0.0, x0);
  if (!detail::finite(x0)) throw ConfigError("initial value is non-finite");
  for (std::size_t j = 0; j <= j0; ++j)
    for (std::size_t i = 0; i < d; ++i) values[j * d + i] = x0[i];

  // single-point segment carrying the lagged state
  const TimeGrid point_grid(-dt, 0.0, dt);
  std::vector<double> point(2 * d);
  const auto wstride =
      static_cast<std::size_t>(std::llround(dt / brownian.grid().dt()));
  const bool shift_time = config.variant == SchemeVariant::alternative;
  Vec fbuf(d), gbuf(d * m), dw(m);
  for (std::size_t j = j0; j + 1 < grid.n_nodes(); ++j) {
    const double* lag = values.data() + (j - r) * d;
    for (std::size_t i = 0; i < d; ++i) point[i] = point[d + i] = lag[i];
    const PathView pview(point_grid, point, d, 2);
    const Segment seg(pview, 0.0, 0.0);
    const double u = grid.node_time(j);
    const double t_eval = shift_time ? u - config.gap() : u;
    model.drift(t_eval, seg, fbuf);
    model.diffusion(t_eval, seg, gbuf);
    if (!detail::finite(fbuf) || !detail::finite(gbuf))
      throw ModelError("model functional returned a non-finite value at t=" +
                       std::to_string(u));
    brownian.aggregate_steps((j - j0) * wstride, (j + 1 - j0) * wstride, dw);
    double* next = values.data() + (j + 1) * d;
    const double* prev = values.data() + j * d;
    for (std::size_t i = 0; i < d; ++i) {
      double acc = prev[i] + fbuf[i] * dt;
      for (std::size_t c = 0; c < m; ++c) acc += gbuf[i * m + c] * dw[c];
      next[i] = acc;
    }
  }
  return SamplePath(grid, d, std::move(values));
}

}  // namespace memgap
