#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "memgap/brownian.hpp"
#include "memgap/errors.hpp"
#include "memgap/initial.hpp"
#include "memgap/model.hpp"
#include "memgap/oracle.hpp"
#include "memgap/sample_path.hpp"
#include "memgap/scheme.hpp"
#include "memgap/stats.hpp"

namespace memgap {

struct RunOptions {
  unsigned workers = 1;
};

/// How the sub-step count r is chosen per gap parameter k.
///
/// fixed_substeps keeps r constant, so each run integrates at dt = 1/(k*r).
/// fixed_product keeps k*r constant, so every run shares one integration
/// grid and differences across k isolate the memory-gap effect.
struct StepPolicy {
  enum class Kind { fixed_substeps, fixed_product };
  Kind kind = Kind::fixed_substeps;
  std::size_t value = 8;

  static StepPolicy fixed_r(std::size_t r) { return {Kind::fixed_substeps, r}; }
  static StepPolicy fixed_prod(std::size_t product) { return {Kind::fixed_product, product}; }

  std::size_t substeps_for(std::size_t k) const {
    if (k < 1) throw ConfigError("StepPolicy: k must be >= 1");
    if (kind == Kind::fixed_substeps) return value;
    if (value % k != 0)
      throw ConfigError("StepPolicy: product " + std::to_string(value) +
                        " is not divisible by k=" + std::to_string(k));
    return value / k;
  }
};

enum class ReferenceKind { scheme, dde_oracle, gbm_closed_form };

/// Reference solution for error estimates: a finer scheme run on the same
/// noise, or a closed-form/semi-analytic oracle where one exists.
struct Reference {
  ReferenceKind kind = ReferenceKind::scheme;
  std::size_t k = 0;

  static Reference scheme_k(std::size_t k) { return {ReferenceKind::scheme, k}; }
  static Reference dde() { return {ReferenceKind::dde_oracle, 0}; }
  static Reference gbm() { return {ReferenceKind::gbm_closed_form, 0}; }
};

struct StrongErrorEstimate {
  std::size_t k_coarse = 0;
  std::size_t k_fine = 0;  // 0 when the reference is an oracle
  std::size_t sample_count = 0;
  double value = 0.0;      ///< estimate of E sup_{[0,T]} |x_fine - x_coarse|^2
  double std_error = 0.0;  ///< 95% CLT half-width
};

struct RateReport {
  std::vector<std::size_t> k_list;
  std::vector<double> errors;
  std::vector<double> half_widths;
  double slope = 0.0;  ///< fitted p in error ~ c (1/k)^{2p}
  double intercept = 0.0;
  double r_squared = 0.0;
  bool degenerate = false;
};

namespace detail {

template <class Acc, class PerPath>
Acc reduce_paths(std::size_t n_paths, unsigned workers, Acc init, PerPath&& per_path) {
  if (workers <= 1 || n_paths < 2) {
    Acc acc = init;
    for (std::size_t i = 0; i < n_paths; ++i) per_path(acc, i);
    return acc;
  }
  const unsigned w = std::min<unsigned>(workers, static_cast<unsigned>(n_paths));
  std::vector<Acc> parts(w, init);
  std::vector<std::thread> threads;
  threads.reserve(w);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned b = 0; b < w; ++b) {
    const std::size_t lo = n_paths * b / w;
    const std::size_t hi = n_paths * (b + 1) / w;
    threads.emplace_back([&, b, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) per_path(parts[b], i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  Acc acc = std::move(parts[0]);
  for (unsigned b = 1; b < w; ++b) acc.merge_from(parts[b]);
  return acc;
}

struct MomentsVector {
  std::vector<RunningMoments> cells;
  void merge_from(const MomentsVector& other) {
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i].merge(other.cells[i]);
  }
};

inline double sq_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

/// Max over shared nodes in [0, T] of |coarse - fine|^2; the fine path is
/// sampled at `stride` of its own nodes.
inline double sup_sq_difference(const SamplePath& coarse, const SamplePath& fine,
                                std::size_t stride) {
  const std::size_t d = coarse.dim();
  const std::size_t c0 = coarse.grid().index_of(0.0);
  const std::size_t f0 = fine.grid().index_of(0.0);
  double sup = 0.0;
  for (std::size_t j = c0; j < coarse.grid().n_nodes(); ++j) {
    const double s = sq_distance(coarse.node(j), fine.node(f0 + (j - c0) * stride));
    sup = std::max(sup, s);
  }
  return sup;
}

inline double sup_sq_vs_values(const SamplePath& coarse, std::span<const double> ref) {
  const std::size_t c0 = coarse.grid().index_of(0.0);
  double sup = 0.0;
  for (std::size_t j = c0; j < coarse.grid().n_nodes(); ++j) {
    const double d = coarse.node(j)[0] - ref[j - c0];
    sup = std::max(sup, d * d);
  }
  return sup;
}

inline void require_pathwise_model(const SfdeModel& model) {
  if (!model.drift || !model.diffusion) throw ConfigError("model has no functionals");
  if (model.initial.dim != model.state_dim || model.initial.delay != model.delay)
    throw ConfigError("model initial process does not match (d, L)");
}

inline DdeOracleSpec dde_spec_for(const SfdeModel& model) {
  if (!model.noise_free)
    throw ConfigError("dde oracle reference requires a noise-free model");
  if (model.state_dim != 1 ||
      (model.name != "deterministic_dde" && model.name != "point_delay_linear"))
    throw ConfigError("dde oracle reference supports scalar point-delay drift only");
  if (!(model.delay > 0.0)) throw ConfigError("dde oracle reference requires L > 0");
  // theta must be deterministic and constant for this oracle; probe one sample
  SeedSpec s{0, 0, StreamTag::initial};
  auto theta = model.initial.sample(s);
  double v0 = 0.0, vmid = 0.0, vend = 0.0;
  theta(0.0, std::span<double>(&v0, 1));
  theta(-0.5 * model.delay, std::span<double>(&vmid, 1));
  theta(-model.delay, std::span<double>(&vend, 1));
  if (std::abs(v0 - vmid) > 1e-12 || std::abs(v0 - vend) > 1e-12)
    throw ConfigError("dde oracle reference supports constant theta only");
  DdeOracleSpec spec;
  spec.delay = model.delay;
  spec.theta = Polynomial::constant(v0);
  // recover the drift coefficient from the response to a unit segment
  {
    const TimeGrid pg(-model.delay, 0.0, model.delay / 2.0);
    SamplePath unit(pg, 1, std::vector<double>(3, 1.0));
    Segment seg = segment_at(unit, 0.0, model.delay);
    double f = 0.0;
    model.drift(0.0, seg, std::span<double>(&f, 1));
    spec.coefficient = f;
  }
  return spec;
}

struct PairedRunPlan {
  SchemeConfig coarse;
  SchemeConfig fine;      // used when the reference is a scheme run
  std::size_t stride = 1; // coarse node -> fine node stride
  double driver_dt = 0.0;
  Reference reference;
};

inline PairedRunPlan plan_paired_runs(std::size_t k_coarse, const Reference& ref, double T,
                                      const StepPolicy& policy) {
  PairedRunPlan plan;
  plan.reference = ref;
  plan.coarse = SchemeConfig{k_coarse, policy.substeps_for(k_coarse), T,
                             SchemeVariant::standard};
  plan.driver_dt = plan.coarse.dt();
  if (ref.kind == ReferenceKind::scheme) {
    if (ref.k % k_coarse != 0)
      throw ConfigError("strong_error: grids do not nest (k_fine % k_coarse != 0)");
    plan.fine = SchemeConfig{ref.k, policy.substeps_for(ref.k), T, SchemeVariant::standard};
    const double ratio = plan.coarse.dt() / plan.fine.dt();
    const auto stride = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(stride)) > kAlignTol * std::max(1.0, ratio))
      throw ConfigError("strong_error: sub-step grids do not nest");
    plan.stride = stride;
    plan.driver_dt = std::min(plan.driver_dt, plan.fine.dt());
  }
  return plan;
}

}  // namespace detail

/// Mean over M paired paths of sup_{[0,T]} |x_ref - x_coarse|^2 under common
/// random numbers: both runs consume the same Brownian path and the same
/// sampled theta per path index.
inline StrongErrorEstimate strong_error(const SfdeModel& model, std::size_t k_coarse,
                                        const Reference& ref, std::size_t n_paths, double T,
                                        std::uint64_t seed, const StepPolicy& policy,
                                        const RunOptions& options = {}) {
  detail::require_pathwise_model(model);
  if (n_paths == 0) throw ConfigError("strong_error: need at least one path");
  const auto plan = detail::plan_paired_runs(k_coarse, ref, T, policy);
  const TimeGrid wgrid(0.0, T, plan.driver_dt);

  std::vector<double> oracle_nodes;  // dde reference, deterministic across paths
  if (ref.kind == ReferenceKind::dde_oracle) {
    const auto spec = detail::dde_spec_for(model);
    const TimeGrid cgrid(0.0, T, plan.coarse.dt());
    oracle_nodes.resize(cgrid.n_nodes());
    const auto pieces_path = dde_oracle(spec, T, plan.coarse.dt());
    const std::size_t o0 = pieces_path.grid().index_of(0.0);
    for (std::size_t j = 0; j < cgrid.n_nodes(); ++j)
      oracle_nodes[j] = pieces_path.node(o0 + j)[0];
  }
  double gbm_mu = 0.0, gbm_sigma = 0.0, gbm_x0 = 1.0;
  if (ref.kind == ReferenceKind::gbm_closed_form) {
    if (model.name != "gbm_l0")
      throw ConfigError("gbm closed-form reference requires the gbm_l0 model");
    // recover parameters by probing the (linear) functionals
    const TimeGrid pg(-1.0, 0.0, 0.5);
    SamplePath unit(pg, 1, std::vector<double>(3, 1.0));
    Segment seg = segment_at(unit, 0.0, 0.0);
    double f = 0.0, g = 0.0;
    model.drift(0.0, seg, std::span<double>(&f, 1));
    model.diffusion(0.0, seg, std::span<double>(&g, 1));
    gbm_mu = f;
    gbm_sigma = g;
    SeedSpec s{seed, 0, StreamTag::initial};
    auto theta = model.initial.sample(s);
    theta(0.0, std::span<double>(&gbm_x0, 1));
  }

  detail::MomentsVector acc;
  acc.cells.resize(1);
  acc = detail::reduce_paths(
      n_paths, options.workers, acc, [&](detail::MomentsVector& a, std::size_t i) {
        const auto theta = model.initial.sample({seed, i, StreamTag::initial});
        const auto w = generate_brownian(wgrid, model.noise_dim, {seed, i, StreamTag::brownian});
        const SamplePath coarse = solve_memory_gap(model, plan.coarse, w, theta);
        double sup = 0.0;
        switch (ref.kind) {
          case ReferenceKind::scheme: {
            const SamplePath fine = solve_memory_gap(model, plan.fine, w, theta);
            sup = detail::sup_sq_difference(coarse, fine, plan.stride);
            break;
          }
          case ReferenceKind::dde_oracle:
            sup = detail::sup_sq_vs_values(coarse, oracle_nodes);
            break;
          case ReferenceKind::gbm_closed_form: {
            const TimeGrid cgrid(0.0, T, plan.coarse.dt());
            const auto exact = gbm_exact_nodes(gbm_x0, gbm_mu, gbm_sigma, cgrid, w);
            sup = detail::sup_sq_vs_values(coarse, exact);
            break;
          }
        }
        a.cells[0].add(sup);
      });

  StrongErrorEstimate est;
  est.k_coarse = k_coarse;
  est.k_fine = ref.kind == ReferenceKind::scheme ? ref.k : 0;
  est.sample_count = n_paths;
  est.value = acc.cells[0].mean();
  est.std_error = acc.cells[0].half_width();
  return est;
}

/// Strong-error sweep over k_list against a common reference, fitted as
/// error ~ c (1/k)^{2p} by log-log least squares on sqrt(error).
inline RateReport convergence_rate(const SfdeModel& model,
                                   const std::vector<std::size_t>& k_list, std::size_t n_paths,
                                   double T, std::uint64_t seed, const StepPolicy& policy,
                                   const Reference& ref, const RunOptions& options = {}) {
  detail::require_pathwise_model(model);
  if (k_list.size() < 3) throw ConfigError("convergence_rate: need at least 3 gap values");
  for (std::size_t i = 0; i + 1 < k_list.size(); ++i) {
    if (k_list[i + 1] <= k_list[i]) throw ConfigError("convergence_rate: k_list not increasing");
    if (k_list[i + 1] % k_list[i] != 0)
      throw ConfigError("convergence_rate: k_list must nest (each k divides the next)");
  }
  if (ref.kind == ReferenceKind::scheme && ref.k < 4 * k_list.back())
    throw ConfigError("convergence_rate: reference k must be >= 4 * max(k_list)");

  std::vector<detail::PairedRunPlan> plans;
  plans.reserve(k_list.size());
  double driver_dt = 1.0;
  for (std::size_t k : k_list) {
    plans.push_back(detail::plan_paired_runs(k, ref, T, policy));
    driver_dt = std::min(driver_dt, plans.back().driver_dt);
  }
  const TimeGrid wgrid(0.0, T, driver_dt);

  // deterministic references shared by every path
  std::vector<std::vector<double>> oracle_nodes(k_list.size());
  if (ref.kind == ReferenceKind::dde_oracle) {
    const auto spec = detail::dde_spec_for(model);
    for (std::size_t idx = 0; idx < k_list.size(); ++idx) {
      const auto oracle_path = dde_oracle(spec, T, plans[idx].coarse.dt());
      const std::size_t o0 = oracle_path.grid().index_of(0.0);
      const TimeGrid cgrid(0.0, T, plans[idx].coarse.dt());
      oracle_nodes[idx].resize(cgrid.n_nodes());
      for (std::size_t j = 0; j < cgrid.n_nodes(); ++j)
        oracle_nodes[idx][j] = oracle_path.node(o0 + j)[0];
    }
  }
  double gbm_mu = 0.0, gbm_sigma = 0.0, gbm_x0 = 1.0;
  if (ref.kind == ReferenceKind::gbm_closed_form) {
    if (model.name != "gbm_l0")
      throw ConfigError("gbm closed-form reference requires the gbm_l0 model");
    const TimeGrid pg(-1.0, 0.0, 0.5);
    SamplePath unit(pg, 1, std::vector<double>(3, 1.0));
    Segment seg = segment_at(unit, 0.0, 0.0);
    double f = 0.0, g = 0.0;
    model.drift(0.0, seg, std::span<double>(&f, 1));
    model.diffusion(0.0, seg, std::span<double>(&g, 1));
    gbm_mu = f;
    gbm_sigma = g;
    SeedSpec s{seed, 0, StreamTag::initial};
    auto theta = model.initial.sample(s);
    theta(0.0, std::span<double>(&gbm_x0, 1));
  }

  detail::MomentsVector acc;
  acc.cells.resize(k_list.size());
  acc = detail::reduce_paths(
      n_paths, options.workers, acc, [&](detail::MomentsVector& a, std::size_t i) {
        const auto theta = model.initial.sample({seed, i, StreamTag::initial});
        const auto w = generate_brownian(wgrid, model.noise_dim, {seed, i, StreamTag::brownian});
        SamplePath ref_path = [&] {  // fine reference computed once per path
          if (ref.kind == ReferenceKind::scheme)
            return solve_memory_gap(model, plans[0].fine, w, theta);
          const TimeGrid trivial(-1.0 - model.delay, T, T + 1.0 + model.delay);
          return SamplePath(trivial, model.state_dim,
                            std::vector<double>(2 * model.state_dim, 0.0));
        }();
        for (std::size_t idx = 0; idx < k_list.size(); ++idx) {
          const SamplePath coarse = solve_memory_gap(model, plans[idx].coarse, w, theta);
          double sup = 0.0;
          switch (ref.kind) {
            case ReferenceKind::scheme:
              sup = detail::sup_sq_difference(coarse, ref_path, plans[idx].stride);
              break;
            case ReferenceKind::dde_oracle:
              sup = detail::sup_sq_vs_values(coarse, oracle_nodes[idx]);
              break;
            case ReferenceKind::gbm_closed_form: {
              const TimeGrid cgrid(0.0, T, plans[idx].coarse.dt());
              const auto exact = gbm_exact_nodes(gbm_x0, gbm_mu, gbm_sigma, cgrid, w);
              sup = detail::sup_sq_vs_values(coarse, exact);
              break;
            }
          }
          a.cells[idx].add(sup);
        }
      });

  RateReport report;
  report.k_list = k_list;
  for (auto& cell : acc.cells) {
    report.errors.push_back(cell.mean());
    report.half_widths.push_back(cell.half_width());
  }
  report.degenerate =
      std::any_of(report.errors.begin(), report.errors.end(), [](double e) { return e <= 0.0; });
  if (!report.degenerate) {
    std::vector<double> inv_k(k_list.size()), rms(k_list.size());
    for (std::size_t i = 0; i < k_list.size(); ++i) {
      inv_k[i] = 1.0 / static_cast<double>(k_list[i]);
      rms[i] = std::sqrt(report.errors[i]);
    }
    const LineFit fit = fit_loglog(inv_k, rms);
    report.slope = fit.slope;
    report.intercept = fit.intercept;
    report.r_squared = fit.r_squared;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Moment, increment, and Holder diagnostics
// ---------------------------------------------------------------------------

struct MomentBoundReport {
  std::vector<std::size_t> k_list;
  std::vector<double> estimates;  ///< E sup_{[-1/k, T]} |x^k|^2 per k
  double theta_norm_sq = 0.0;     ///< estimate of E ||theta||^2
  double growth_hat = 0.0;        ///< probed linear-growth constant
  double ceiling = 0.0;           ///< 2 C1 e^{C2 T} + 2 E||theta||^2
  double ratio = 0.0;             ///< max/min of the estimates
  bool pass = false;
};

/// Checks that E sup |x^k|^2 is flat in k (< 1.5x variation) and sits below
/// the Gronwall ceiling computed from the probed growth constant.
inline MomentBoundReport moment_bound_check(const SfdeModel& model,
                                            const std::vector<std::size_t>& k_list,
                                            std::size_t n_paths, double T, std::uint64_t seed,
                                            const StepPolicy& policy,
                                            const RunOptions& options = {}) {
  detail::require_pathwise_model(model);
  if (k_list.empty()) throw ConfigError("moment_bound_check: empty k_list");

  MomentBoundReport report;
  report.k_list = k_list;
  report.growth_hat = probe_lipschitz(model, 3000, seed ^ 0x67726f77ull, T).growth_hat;

  // E ||theta||^2 over the initial window
  {
    RunningMoments norm_acc;
    const std::size_t n_norm = std::min<std::size_t>(n_paths, 500);
    Vec buf(model.state_dim);
    for (std::size_t i = 0; i < n_norm; ++i) {
      auto theta = model.initial.sample({seed, i, StreamTag::initial});
      double sup = 0.0;
      const std::size_t probes = model.delay > 0.0 ? 257 : 1;
      for (std::size_t j = 0; j < probes; ++j) {
        const double v = model.delay > 0.0
                             ? -model.delay +
                                   model.delay * static_cast<double>(j) /
                                       static_cast<double>(probes - 1)
                             : 0.0;
        theta(v, buf);
        sup = std::max(sup, detail::euclid_norm(buf));
      }
      norm_acc.add(sup * sup);
    }
    report.theta_norm_sq = norm_acc.mean();
  }

  double driver_dt = 1.0;
  std::vector<SchemeConfig> configs;
  for (std::size_t k : k_list) {
    configs.push_back({k, policy.substeps_for(k), T, SchemeVariant::standard});
    driver_dt = std::min(driver_dt, configs.back().dt());
  }
  const TimeGrid wgrid(0.0, T, driver_dt);

  detail::MomentsVector acc;
  acc.cells.resize(k_list.size());
  acc = detail::reduce_paths(
      n_paths, options.workers, acc, [&](detail::MomentsVector& a, std::size_t i) {
        const auto theta = model.initial.sample({seed, i, StreamTag::initial});
        const auto w = generate_brownian(wgrid, model.noise_dim, {seed, i, StreamTag::brownian});
        for (std::size_t idx = 0; idx < k_list.size(); ++idx) {
          const SamplePath x = solve_memory_gap(model, configs[idx], w, theta);
          const std::size_t from = x.grid().index_of(-configs[idx].gap());
          double sup = 0.0;
          for (std::size_t j = from; j < x.grid().n_nodes(); ++j)
            sup = std::max(sup, detail::euclid_norm(x.node(j)));
          a.cells[idx].add(sup * sup);
        }
      });
  for (auto& cell : acc.cells) report.estimates.push_back(cell.mean());

  const double d2 = report.growth_hat * report.growth_hat;
  const auto m2 = static_cast<double>(model.noise_dim * model.noise_dim);
  const double c2 = 6.0 * d2 * (T + 4.0 * m2);
  const double c1 =
      3.0 * report.theta_norm_sq + 6.0 * T * d2 * (T + 4.0 * m2) * (1.0 + report.theta_norm_sq);
  report.ceiling = 2.0 * c1 * std::exp(c2 * T) + 2.0 * report.theta_norm_sq;

  const auto [lo, hi] = std::minmax_element(report.estimates.begin(), report.estimates.end());
  report.ratio = *lo > 0.0 ? *hi / *lo : (*hi > 0.0 ? std::numeric_limits<double>::infinity()
                                                    : 1.0);
  report.pass = report.ratio < 1.5 &&
                std::all_of(report.estimates.begin(), report.estimates.end(),
                            [&](double e) { return e <= report.ceiling; });
  return report;
}

struct IncrementMomentReport {
  std::vector<int> gammas;
  std::vector<double> lags;
  std::vector<std::vector<double>> moments;  ///< [gamma][lag]
  std::vector<double> slopes;                ///< per gamma
  bool degenerate = false;
};

/// Log-log slope of E|x^k(t) - x^k(s)|^{2 gamma} against the lag |t - s|,
/// averaged over node pairs and paths.
inline IncrementMomentReport increment_moment_check(const SfdeModel& model, std::size_t k,
                                                    const std::vector<int>& gammas,
                                                    const std::vector<double>& lags,
                                                    std::size_t n_paths, double T,
                                                    std::uint64_t seed, const StepPolicy& policy,
                                                    const RunOptions& options = {}) {
  detail::require_pathwise_model(model);
  if (gammas.empty() || lags.empty()) throw ConfigError("increment_moment_check: empty inputs");
  const SchemeConfig config{k, policy.substeps_for(k), T, SchemeVariant::standard};
  std::vector<std::size_t> lag_steps;
  for (double lag : lags) {
    const double steps = lag / config.dt();
    const auto s = static_cast<long long>(std::llround(steps));
    if (s < 1 || std::abs(steps - static_cast<double>(s)) > kAlignTol * std::max(1.0, steps))
      throw AlignmentError("increment lag is not node-aligned");
    if (lag > T + kAlignTol) throw ConfigError("increment lag exceeds the horizon");
    lag_steps.push_back(static_cast<std::size_t>(s));
  }
  const TimeGrid wgrid(0.0, T, config.dt());

  detail::MomentsVector acc;
  acc.cells.resize(gammas.size() * lags.size());
  acc = detail::reduce_paths(
      n_paths, options.workers, acc, [&](detail::MomentsVector& a, std::size_t i) {
        const auto theta = model.initial.sample({seed, i, StreamTag::initial});
        const auto w = generate_brownian(wgrid, model.noise_dim, {seed, i, StreamTag::brownian});
        const SamplePath x = solve_memory_gap(model, config, w, theta);
        const std::size_t j0 = x.grid().index_of(0.0);
        const std::size_t jn = x.grid().n_nodes() - 1;
        for (std::size_t li = 0; li < lag_steps.size(); ++li) {
          const std::size_t s = lag_steps[li];
          for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
            double mean = 0.0;
            std::size_t count = 0;
            for (std::size_t j = j0; j + s <= jn; ++j) {
              const double sq = detail::sq_distance(x.node(j), x.node(j + s));
              mean += gammas[gi] == 1 ? sq : std::pow(sq, gammas[gi]);
              ++count;
            }
            if (count > 0) a.cells[gi * lag_steps.size() + li].add(mean / count);
          }
        }
      });

  IncrementMomentReport report;
  report.gammas = gammas;
  report.lags = lags;
  report.moments.resize(gammas.size());
  for (std::size_t gi = 0; gi < gammas.size(); ++gi)
    for (std::size_t li = 0; li < lags.size(); ++li)
      report.moments[gi].push_back(acc.cells[gi * lags.size() + li].mean());
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    const auto& m = report.moments[gi];
    if (std::any_of(m.begin(), m.end(), [](double v) { return v <= 0.0; })) {
      report.degenerate = true;
      report.slopes.push_back(0.0);
      continue;
    }
    report.slopes.push_back(fit_loglog(report.lags, m).slope);
  }
  return report;
}

struct HolderEntry {
  std::vector<double> lags;
  std::vector<double> max_increments;
  double exponent = 0.0;
  bool degenerate = false;
};

/// Pathwise Holder diagnostic: per-lag max increment over nodes in [0, T],
/// exponent = least-squares slope of log(max increment) vs log(lag).
inline HolderEntry holder_estimate(const SamplePath& path, std::span<const double> lags) {
  HolderEntry entry;
  const TimeGrid& g = path.grid();
  const std::size_t j0 = g.t_start() < 0.0 ? g.index_of(0.0) : 0;
  for (double lag : lags) {
    const double steps = lag / g.dt();
    const auto s = static_cast<long long>(std::llround(steps));
    if (s < 1 || std::abs(steps - static_cast<double>(s)) > kAlignTol * std::max(1.0, steps))
      throw AlignmentError("holder lag is not node-aligned");
    double sup = 0.0;
    for (std::size_t j = j0; j + static_cast<std::size_t>(s) < g.n_nodes(); ++j)
      sup = std::max(sup,
                     detail::sq_distance(path.node(j), path.node(j + static_cast<std::size_t>(s))));
    entry.lags.push_back(lag);
    entry.max_increments.push_back(std::sqrt(sup));
  }
  if (std::any_of(entry.max_increments.begin(), entry.max_increments.end(),
                  [](double v) { return v <= 1e-300; })) {
    entry.degenerate = true;
    return entry;
  }
  entry.exponent = fit_loglog(entry.lags, entry.max_increments).slope;
  return entry;
}

struct HolderReport {
  std::vector<double> exponents;
  double q05 = 0.0;
  double median = 0.0;
  double q95 = 0.0;
  bool degenerate = false;
};

/// Holder exponents over a Monte Carlo batch of scheme paths.
inline HolderReport holder_suite(const SfdeModel& model, std::size_t k, std::size_t n_paths,
                                 double T, std::uint64_t seed, const StepPolicy& policy,
                                 std::size_t lag_levels, const RunOptions& options = {}) {
  detail::require_pathwise_model(model);
  const SchemeConfig config{k, policy.substeps_for(k), T, SchemeVariant::standard};
  std::vector<double> lags;
  for (std::size_t j = 0; j < lag_levels; ++j)
    lags.push_back(config.dt() * static_cast<double>(1ull << j));
  const TimeGrid wgrid(0.0, T, config.dt());

  struct ExponentAcc {
    std::vector<double> exponents;
    bool degenerate = false;
    void merge_from(const ExponentAcc& o) {
      exponents.insert(exponents.end(), o.exponents.begin(), o.exponents.end());
      degenerate = degenerate || o.degenerate;
    }
  };
  ExponentAcc acc = detail::reduce_paths(
      n_paths, options.workers, ExponentAcc{}, [&](ExponentAcc& a, std::size_t i) {
        const auto theta = model.initial.sample({seed, i, StreamTag::initial});
        const auto w = generate_brownian(wgrid, model.noise_dim, {seed, i, StreamTag::brownian});
        const SamplePath x = solve_memory_gap(model, config, w, theta);
        const HolderEntry entry = holder_estimate(x, lags);
        if (entry.degenerate)
          a.degenerate = true;
        else
          a.exponents.push_back(entry.exponent);
      });

  HolderReport report;
  report.exponents = std::move(acc.exponents);
  report.degenerate = acc.degenerate || report.exponents.empty();
  if (!report.exponents.empty()) {
    std::vector<double> sorted = report.exponents;
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(sorted.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
      const double w = pos - std::floor(pos);
      return (1.0 - w) * sorted[lo] + w * sorted[hi];
    };
    report.q05 = quantile(0.05);
    report.median = quantile(0.5);
    report.q95 = quantile(0.95);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Martingale-type inequality check
// ---------------------------------------------------------------------------

enum class TestIntegrand { zero, constant_one, clipped_brownian };

struct MartingaleCheck {
  int k_order = 1;
  double lhs = 0.0;        ///< E sup_t |int_0^t g dW|^{2k}
  double lhs_half = 0.0;
  double rhs = 0.0;        ///< A_k (b-a)^{k-1} int E|g|^{2k}
  double rhs_half = 0.0;
  double bound_constant = 0.0;  ///< A_k
  bool pass = false;
};

/// Monte Carlo check of E sup |int g dW|^{2k} <= A_k (b-a)^{k-1} int E|g|^{2k}
/// for adapted step integrands (scalar case d = m = 1), with
/// A_k = d^{k-1} (4 k^3 m^2 / (2k-1))^k.
inline MartingaleCheck martingale_inequality_check(int k_order, TestIntegrand integrand,
                                                   std::size_t n_paths, double interval_length,
                                                   std::size_t n_steps, std::uint64_t seed,
                                                   const RunOptions& options = {}) {
  if (k_order != 1 && k_order != 2)
    throw ConfigError("martingale_inequality_check: k_order must be 1 or 2");
  if (n_steps < 2) throw ConfigError("martingale_inequality_check: need at least 2 steps");
  const TimeGrid grid(0.0, interval_length, interval_length / static_cast<double>(n_steps));
  const double dt = grid.dt();
  const double kd = static_cast<double>(k_order);
  const double a_k = std::pow(4.0 * kd * kd * kd / (2.0 * kd - 1.0), kd);  // d = m = 1

  detail::MomentsVector acc;
  acc.cells.resize(2);  // [0] lhs, [1] integral of |g|^{2k}
  acc = detail::reduce_paths(
      n_paths, options.workers, acc, [&](detail::MomentsVector& a, std::size_t i) {
        const auto w = generate_brownian(grid, 1, {seed, i, StreamTag::brownian});
        double wt = 0.0;        // W at the left endpoint of the current step
        double ito = 0.0;       // running int g dW
        double sup = 0.0;
        double g_int = 0.0;
        for (std::size_t j = 0; j < n_steps; ++j) {
          const double g = integrand == TestIntegrand::constant_one
                               ? 1.0
                               : (integrand == TestIntegrand::zero ? 0.0
                                                                   : std::clamp(wt, -1.0, 1.0));
          const double dw = w.increment(j)[0];
          ito += g * dw;
          wt += dw;
          sup = std::max(sup, std::abs(ito));
          g_int += std::pow(g * g, kd) * dt;
        }
        a.cells[0].add(std::pow(sup * sup, kd));
        a.cells[1].add(g_int);
      });

  MartingaleCheck check;
  check.k_order = k_order;
  check.bound_constant = a_k;
  check.lhs = acc.cells[0].mean();
  check.lhs_half = acc.cells[0].half_width();
  check.rhs = a_k * std::pow(interval_length, kd - 1.0) * acc.cells[1].mean();
  check.rhs_half = a_k * std::pow(interval_length, kd - 1.0) * acc.cells[1].half_width();
  check.pass = check.lhs - check.lhs_half <= check.rhs + check.rhs_half;
  return check;
}

}  // namespace memgap
