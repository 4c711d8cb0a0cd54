#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "memgap/errors.hpp"
#include "memgap/rng.hpp"
#include "memgap/sample_path.hpp"

namespace memgap {

/// A sampled initial function theta: [-L, 0] -> R^d.
using InitialFn = std::function<void(double, std::span<double>)>;

/// F_0-measurable initial process: delay window plus a sampler that turns an
/// RNG stream into one continuous realization. Sampling consumes only the
/// `initial` stream, keeping theta independent of the Brownian driver.
struct InitialProcess {
  double delay = 0.0;
  std::size_t dim = 1;
  std::function<InitialFn(std::mt19937_64&)> sampler;

  InitialFn sample(const SeedSpec& seed) const {
    if (seed.tag != StreamTag::initial)
      throw ConfigError("InitialProcess::sample requires the initial stream tag");
    if (!sampler) throw ConfigError("InitialProcess has no sampler");
    auto engine = make_engine(seed);
    return sampler(engine);
  }
};

/// Extends theta constantly to the left: hat(t) = theta(t) on [-L, 0] and
/// hat(t) = theta(-L) on [-1-L, -L]. Continuity at -L is exact because both
/// branches read theta(-L).
inline InitialFn extend_initial(InitialFn theta, double delay) {
  if (delay < 0.0) throw ConfigError("extend_initial: negative delay");
  if (!theta) throw ConfigError("extend_initial: empty initial function");
  // reject functions that are not usable on all of [-L, 0]
  {
    std::vector<double> probe(64);
    for (double t : {-delay, -0.5 * delay, 0.0}) {
      try {
        theta(t, std::span<double>(probe));
      } catch (const std::exception& e) {
        throw ConfigError(std::string("initial function not defined on [-L, 0]: ") + e.what());
      }
    }
  }
  const double lo = -1.0 - delay;
  return [theta = std::move(theta), delay, lo](double t, std::span<double> out) {
    if (t < lo - kAlignTol || t > kAlignTol)
      throw DomainError("extended initial function evaluated outside [-1-L, 0]");
    double s = t < -delay ? -delay : (t > 0.0 ? 0.0 : t);
    theta(s, out);
  };
}

/// theta identically equal to `value`.
inline InitialProcess constant_initial(Vec value, double delay) {
  if (value.empty()) throw ConfigError("constant_initial: empty value");
  InitialProcess p;
  p.delay = delay;
  p.dim = value.size();
  p.sampler = [value = std::move(value)](std::mt19937_64&) -> InitialFn {
    return [value](double, std::span<double> out) {
      for (std::size_t i = 0; i < value.size(); ++i) out[i] = value[i];
    };
  };
  return p;
}

inline InitialProcess zero_initial(std::size_t dim, double delay) {
  return constant_initial(Vec(dim, 0.0), delay);
}

/// theta(v) = scale * B(v + L) for a standard d-dimensional Brownian path B
/// pinned to 0 at v = -L, realized as the linear interpolant of samples at
/// `resolution` spacing. Satisfies E|theta(t)-theta(s)|^{2g} <= C|t-s|^g.
inline InitialProcess brownian_initial(std::size_t dim, double delay, double scale,
                                       double resolution) {
  if (dim == 0) throw ConfigError("brownian_initial: dim must be positive");
  if (!(resolution > 0.0)) throw ConfigError("brownian_initial: resolution must be positive");
  InitialProcess p;
  p.delay = delay;
  p.dim = dim;
  if (delay <= 0.0) {
    p.sampler = [dim](std::mt19937_64&) -> InitialFn {
      return [dim](double, std::span<double> out) {
        for (std::size_t i = 0; i < dim; ++i) out[i] = 0.0;
      };
    };
    return p;
  }
  const auto n_steps = static_cast<std::size_t>(std::llround(delay / resolution));
  const double dt = delay / static_cast<double>(std::max<std::size_t>(n_steps, 1));
  p.sampler = [dim, delay, scale, dt, n_steps](std::mt19937_64& engine) -> InitialFn {
    auto nodes = std::make_shared<std::vector<double>>((n_steps + 1) * dim, 0.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = scale * std::sqrt(dt);
    for (std::size_t j = 1; j <= n_steps; ++j)
      for (std::size_t i = 0; i < dim; ++i)
        (*nodes)[j * dim + i] = (*nodes)[(j - 1) * dim + i] + sd * normal(engine);
    return [nodes, dim, delay, dt, n_steps](double v, std::span<double> out) {
      if (v < -delay - kAlignTol || v > kAlignTol)
        throw DomainError("initial function evaluated outside [-L, 0]");
      double p = (v + delay) / dt;
      if (p < 0.0) p = 0.0;
      if (p > static_cast<double>(n_steps)) p = static_cast<double>(n_steps);
      const double fl = std::floor(p);
      auto j = static_cast<std::size_t>(fl);
      if (j >= n_steps) {
        for (std::size_t i = 0; i < dim; ++i) out[i] = (*nodes)[n_steps * dim + i];
        return;
      }
      const double w = p - fl;
      for (std::size_t i = 0; i < dim; ++i)
        out[i] = (1.0 - w) * (*nodes)[j * dim + i] + w * (*nodes)[(j + 1) * dim + i];
    };
  };
  return p;
}

}  // namespace memgap
