#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "memgap/errors.hpp"
#include "memgap/initial.hpp"
#include "memgap/sample_path.hpp"

namespace memgap {

/// Drift/diffusion functionals are pure maps of (t, segment). Diffusion
/// writes the d x m coefficient matrix in row-major order.
using DriftFn = std::function<void(double, const Segment&, std::span<double>)>;
using DiffusionFn = std::function<void(double, const Segment&, std::span<double>)>;

struct SfdeModel {
  std::string name;
  std::size_t state_dim = 1;
  std::size_t noise_dim = 1;
  double delay = 0.0;
  DriftFn drift;
  DiffusionFn diffusion;
  InitialProcess initial;
  std::optional<double> declared_lipschitz;
  bool declared_time_regular = false;
  bool noise_free = false;
};

namespace detail {

inline double param(const std::map<std::string, double>& params, const std::string& key,
                    double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

/// Composite trapezoid of one coordinate over the segment window, split at
/// every covered grid node. Exact for the piecewise-linear representative.
inline void segment_window_average(const Segment& seg, std::span<double> out,
                                   std::vector<double>& prev, std::vector<double>& cur) {
  const double L = seg.delay();
  const std::size_t d = seg.dim();
  for (std::size_t i = 0; i < d; ++i) out[i] = 0.0;
  if (L <= 0.0) {
    seg.eval(0.0, out);
    return;
  }
  const auto [first, last] = seg.covered_nodes();
  const TimeGrid& g = seg.grid();
  double t_prev = seg.anchor() - L;
  seg.eval(-L, prev);
  for (std::size_t j = first; j <= last; ++j) {
    const double t = g.node_time(j);
    if (t <= t_prev + kAlignTol) continue;
    for (std::size_t i = 0; i < d; ++i) cur[i] = seg.path().node(j)[i];
    for (std::size_t i = 0; i < d; ++i) out[i] += 0.5 * (t - t_prev) * (prev[i] + cur[i]);
    t_prev = t;
    std::swap(prev, cur);
  }
  if (seg.anchor() > t_prev + kAlignTol) {
    seg.eval(0.0, cur);
    for (std::size_t i = 0; i < d; ++i)
      out[i] += 0.5 * (seg.anchor() - t_prev) * (prev[i] + cur[i]);
  }
  for (std::size_t i = 0; i < d; ++i) out[i] /= L;
}

}  // namespace detail

/// Builds one of the named test models.
///
/// point_delay_linear  F = a*eta(-L), G = diag(b*eta(-L))      (params a, b, delay, dim)
/// distributed_delay   F = (a/L) * int eta, G = diag(b*eta(0)) (params a, b, delay, dim)
/// gbm_l0              L=0, F = mu*eta(0), G = sigma*eta(0)    (params mu, sigma, x0)
/// deterministic_dde   F = eta(-L), G = 0                      (params delay)
/// pure_noise          F = 0, G = I, theta = 0                 (params dim)
inline SfdeModel builtin_model(const std::string& name,
                               const std::map<std::string, double>& params = {}) {
  SfdeModel model;
  model.name = name;
  const auto dim = static_cast<std::size_t>(detail::param(params, "dim", 1.0));
  if (dim == 0) throw ConfigError("builtin_model: dim must be positive");

  if (name == "point_delay_linear" || name == "distributed_delay") {
    const double a = detail::param(params, "a", 1.0);
    const double b = detail::param(params, "b", 0.0);
    const double L = detail::param(params, "delay", 1.0);
    if (L < 0.0) throw ConfigError("builtin_model: negative delay");
    if (name == "distributed_delay" && L <= 0.0)
      throw ConfigError("distributed_delay requires delay > 0");
    model.state_dim = dim;
    model.noise_dim = dim;
    model.delay = L;
    model.declared_lipschitz = std::abs(a) + std::abs(b);
    model.declared_time_regular = true;
    model.noise_free = b == 0.0;
    model.initial = constant_initial(Vec(dim, 1.0), L);
    if (name == "point_delay_linear") {
      model.drift = [a, L](double, const Segment& seg, std::span<double> out) {
        seg.eval(-L, out);
        for (double& v : out) v *= a;
      };
      model.diffusion = [b, L, dim](double, const Segment& seg, std::span<double> out) {
        Vec tmp(dim);
        seg.eval(-L, tmp);
        for (double& v : out) v = 0.0;
        for (std::size_t i = 0; i < dim; ++i) out[i * dim + i] = b * tmp[i];
      };
    } else {
      model.drift = [a, dim](double, const Segment& seg, std::span<double> out) {
        std::vector<double> prev(dim), cur(dim);
        detail::segment_window_average(seg, out, prev, cur);
        for (double& v : out) v *= a;
      };
      model.diffusion = [b, dim](double, const Segment& seg, std::span<double> out) {
        Vec tmp(dim);
        seg.eval(0.0, tmp);
        for (double& v : out) v = 0.0;
        for (std::size_t i = 0; i < dim; ++i) out[i * dim + i] = b * tmp[i];
      };
    }
    return model;
  }

  if (name == "gbm_l0") {
    const double mu = detail::param(params, "mu", 0.0);
    const double sigma = detail::param(params, "sigma", 0.0);
    const double x0 = detail::param(params, "x0", 1.0);
    model.state_dim = 1;
    model.noise_dim = 1;
    model.delay = 0.0;
    model.declared_lipschitz = std::abs(mu) + std::abs(sigma);
    model.declared_time_regular = true;
    model.noise_free = sigma == 0.0;
    model.initial = constant_initial(Vec{x0}, 0.0);
    model.drift = [mu](double, const Segment& seg, std::span<double> out) {
      out[0] = mu * seg.scalar(0.0);
    };
    model.diffusion = [sigma](double, const Segment& seg, std::span<double> out) {
      out[0] = sigma * seg.scalar(0.0);
    };
    return model;
  }

  if (name == "deterministic_dde") {
    const double L = detail::param(params, "delay", 1.0);
    if (L < 0.0) throw ConfigError("builtin_model: negative delay");
    model.state_dim = 1;
    model.noise_dim = 1;
    model.delay = L;
    model.declared_lipschitz = 1.0;
    model.declared_time_regular = true;
    model.noise_free = true;
    model.initial = constant_initial(Vec{1.0}, L);
    model.drift = [L](double, const Segment& seg, std::span<double> out) {
      out[0] = seg.scalar(-L);
    };
    model.diffusion = [](double, const Segment&, std::span<double> out) { out[0] = 0.0; };
    return model;
  }

  if (name == "pure_noise") {
    model.state_dim = dim;
    model.noise_dim = dim;
    model.delay = detail::param(params, "delay", 0.0);
    model.declared_lipschitz = 0.0;
    model.declared_time_regular = true;
    model.initial = zero_initial(dim, model.delay);
    model.drift = [](double, const Segment&, std::span<double> out) {
      for (double& v : out) v = 0.0;
    };
    model.diffusion = [dim](double, const Segment&, std::span<double> out) {
      for (double& v : out) v = 0.0;
      for (std::size_t i = 0; i < dim; ++i) out[i * dim + i] = 1.0;
    };
    return model;
  }

  throw ConfigError("builtin_model: unknown model '" + name + "'");
}

/// Empirical probe of the Lipschitz and linear-growth constants.
struct LipschitzProbe {
  double alpha_hat = 0.0;   ///< max (|dF| + |dG|_F) / ||eta1 - eta2||, a lower bound
  double growth_hat = 0.0;  ///< max (|F| + |G|_F) / (1 + ||eta||), a lower bound
};

namespace detail {

inline double frobenius(std::span<const double> m) {
  double s = 0.0;
  for (double v : m) s += v * v;
  return std::sqrt(s);
}

}  // namespace detail

/// Evaluates F and G on randomized segment pairs. Probe shapes cycle through
/// rough (iid nodes), near-constant, and ramp profiles at several magnitudes
/// so that both the point-evaluation and window-averaging functionals see
/// extremal directions.
inline LipschitzProbe probe_lipschitz(const SfdeModel& model, std::size_t n_probes,
                                      std::uint64_t seed, double t_max = 1.0) {
  if (n_probes < 2) throw ConfigError("probe_lipschitz: need at least 2 probes");
  const std::size_t d = model.state_dim;
  const double L = model.delay;
  const std::size_t n_nodes = L > 0.0 ? 17 : 2;
  const double t0 = L > 0.0 ? -L : -1.0;
  const TimeGrid grid(t0, 0.0, (0.0 - t0) / static_cast<double>(n_nodes - 1));

  std::mt19937_64 engine(detail::splitmix64(seed ^ 0x4c69705368697a00ull));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, t_max);
  const double scales[3] = {0.1, 1.0, 10.0};

  auto draw_nodes = [&](std::size_t kind, double scale) {
    std::vector<double> v(n_nodes * d);
    if (kind == 0) {
      for (double& x : v) x = scale * normal(engine);
    } else if (kind == 1) {
      for (std::size_t i = 0; i < d; ++i) {
        const double c = scale * normal(engine);
        for (std::size_t j = 0; j < n_nodes; ++j)
          v[j * d + i] = c + 0.05 * scale * normal(engine);
      }
    } else {
      for (std::size_t i = 0; i < d; ++i) {
        const double c0 = scale * normal(engine);
        const double c1 = scale * normal(engine);
        for (std::size_t j = 0; j < n_nodes; ++j) {
          const double w = static_cast<double>(j) / static_cast<double>(n_nodes - 1);
          v[j * d + i] = (1.0 - w) * c0 + w * c1 + 0.05 * scale * normal(engine);
        }
      }
    }
    return v;
  };

  LipschitzProbe probe;
  Vec f1(d), f2(d), g1(d * model.noise_dim), g2(d * model.noise_dim);
  for (std::size_t it = 0; it < n_probes; ++it) {
    const double scale = scales[it % 3];
    const std::size_t kind = (it / 3) % 3;
    const double t = uni(engine);
    auto v1 = draw_nodes(kind, scale);
    auto v2 = draw_nodes(kind, scale);
    SamplePath p1(grid, d, v1);
    SamplePath p2(grid, d, v2);
    Segment s1 = segment_at(p1, 0.0, L);
    Segment s2 = segment_at(p2, 0.0, L);
    model.drift(t, s1, f1);
    model.drift(t, s2, f2);
    model.diffusion(t, s1, g1);
    model.diffusion(t, s2, g2);

    const double n1 = sup_norm(s1);
    const double n2 = sup_norm(s2);
    probe.growth_hat = std::max(
        probe.growth_hat, (detail::euclid_norm(f1) + detail::frobenius(g1)) / (1.0 + n1));
    probe.growth_hat = std::max(
        probe.growth_hat, (detail::euclid_norm(f2) + detail::frobenius(g2)) / (1.0 + n2));

    // ||eta1 - eta2||: node-wise difference, exact for piecewise-linear paths
    double dnorm = 0.0;
    for (std::size_t j = 0; j < n_nodes; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = v1[j * d + i] - v2[j * d + i];
        s += diff * diff;
      }
      dnorm = std::max(dnorm, std::sqrt(s));
    }
    if (dnorm < 1e-12) continue;
    for (std::size_t i = 0; i < d; ++i) f1[i] -= f2[i];
    for (std::size_t i = 0; i < g1.size(); ++i) g1[i] -= g2[i];
    probe.alpha_hat = std::max(
        probe.alpha_hat, (detail::euclid_norm(f1) + detail::frobenius(g1)) / dnorm);
  }
  return probe;
}

}  // namespace memgap
