#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "memgap/initial.hpp"
#include "memgap/sample_path.hpp"
#include "memgap/stats.hpp"
#include "memgap/time_grid.hpp"

namespace memgap {
namespace {

SamplePath path_from(const TimeGrid& grid, double (*f)(double)) {
  std::vector<double> values(grid.n_nodes());
  for (std::size_t j = 0; j < grid.n_nodes(); ++j) values[j] = f(grid.node_time(j));
  return SamplePath(grid, 1, std::move(values));
}

TEST(TimeGrid, RejectsNonIntegralStepCount) {
  EXPECT_THROW(TimeGrid(0.0, 1.0, 0.3), ConfigError);
  EXPECT_THROW(TimeGrid(0.0, 1.0, -0.1), ConfigError);
  EXPECT_THROW(TimeGrid(1.0, 1.0, 0.1), ConfigError);
}

TEST(TimeGrid, IndexOfRefusesOffNodeTimes) {
  TimeGrid grid(-2.0, 2.0, 0.25);
  EXPECT_EQ(grid.index_of(-2.0), 0u);
  EXPECT_EQ(grid.index_of(0.0), 8u);
  EXPECT_EQ(grid.index_of(2.0), 16u);
  EXPECT_THROW(grid.index_of(0.1), AlignmentError);
  EXPECT_THROW(grid.index_of(2.25), AlignmentError);
}

TEST(TimeGrid, NodeTimesAreAffine) {
  TimeGrid grid(-1.5, 1.0, 0.125);
  for (std::size_t j = 0; j < grid.n_nodes(); ++j)
    EXPECT_DOUBLE_EQ(grid.node_time(j), -1.5 + 0.125 * static_cast<double>(j));
}

// ---------------------------------------------------------------------------
// extend_initial
// ---------------------------------------------------------------------------

InitialFn scalar_fn(double (*f)(double)) {
  return [f](double t, std::span<double> out) { out[0] = f(t); };
}

double eval1(const InitialFn& fn, double t) {
  double v = 0.0;
  fn(t, std::span<double>(&v, 1));
  return v;
}

TEST(ExtendInitial, ConstantOnTheLeftIdentityOnTheRight) {
  auto hat = extend_initial(scalar_fn(+[](double t) { return t; }), 1.0);
  EXPECT_DOUBLE_EQ(eval1(hat, -1.5), -1.0);
  EXPECT_DOUBLE_EQ(eval1(hat, -2.0), -1.0);
  EXPECT_DOUBLE_EQ(eval1(hat, -0.25), -0.25);
  EXPECT_DOUBLE_EQ(eval1(hat, 0.0), 0.0);
}

TEST(ExtendInitial, ZeroStaysZero) {
  auto hat = extend_initial(scalar_fn(+[](double) { return 0.0; }), 0.5);
  for (double t : {-1.5, -1.0, -0.5, -0.25, 0.0}) EXPECT_DOUBLE_EQ(eval1(hat, t), 0.0);
}

TEST(ExtendInitial, SqrtProfile) {
  auto hat = extend_initial(scalar_fn(+[](double t) { return std::sqrt(std::abs(t)); }), 1.0);
  EXPECT_DOUBLE_EQ(eval1(hat, -2.0), 1.0);
  EXPECT_DOUBLE_EQ(eval1(hat, -0.25), 0.5);
}

TEST(ExtendInitial, ContinuityAtTheJunction) {
  auto hat = extend_initial(scalar_fn(+[](double t) { return 3.0 * t + 2.0; }), 1.0);
  EXPECT_DOUBLE_EQ(eval1(hat, -1.0), eval1(hat, -1.0 - 1e-12));
}

TEST(ExtendInitial, RejectsOutOfDomainEvaluation) {
  auto hat = extend_initial(scalar_fn(+[](double t) { return t; }), 1.0);
  double v = 0.0;
  EXPECT_THROW(hat(0.5, std::span<double>(&v, 1)), DomainError);
  EXPECT_THROW(hat(-2.5, std::span<double>(&v, 1)), DomainError);
}

TEST(ExtendInitial, RejectsFunctionUndefinedOnWindow) {
  InitialFn partial = [](double t, std::span<double> out) {
    if (t < -0.5) throw DomainError("not defined");
    out[0] = t;
  };
  EXPECT_THROW(extend_initial(partial, 1.0), ConfigError);
}

// ---------------------------------------------------------------------------
// segment_at and sup_norm
// ---------------------------------------------------------------------------

TEST(Segment, ConstantPathGivesConstantSegment) {
  TimeGrid grid(-2.0, 1.0, 0.25);
  auto path = path_from(grid, +[](double) { return 7.5; });
  Segment seg = segment_at(path, 0.5, 1.0);
  for (double v : {-1.0, -0.7, -0.25, 0.0}) EXPECT_DOUBLE_EQ(seg.scalar(v), 7.5);
}

TEST(Segment, LinearInterpolationIdentity) {
  TimeGrid grid(-2.0, 1.0, 0.25);
  auto path = path_from(grid, +[](double t) { return t; });
  Segment seg = segment_at(path, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(seg.scalar(-0.25), 0.25);
  EXPECT_DOUBLE_EQ(seg.scalar(-0.8), -0.3);
}

TEST(Segment, InitialSegmentReadsTheExtension) {
  // path holding hat-theta for theta(t) = t, L = 1
  TimeGrid grid(-2.0, 1.0, 0.125);
  auto hat_path = path_from(grid, +[](double t) { return t < -1.0 ? -1.0 : t; });
  Segment seg = segment_at(hat_path, -1.0, 1.0);
  for (double v : {-1.0, -0.5, -0.125, 0.0})
    EXPECT_DOUBLE_EQ(seg.scalar(v), v - 1.0 < -1.0 ? -1.0 : v - 1.0);
}

TEST(Segment, EndpointsMatchThePath) {
  TimeGrid grid(-2.0, 2.0, 0.25);
  auto path = path_from(grid, +[](double t) { return std::sin(t); });
  for (double t : {0.0, 0.5, 1.75}) {
    Segment seg = segment_at(path, t, 1.0);
    EXPECT_DOUBLE_EQ(seg.scalar(0.0), path.scalar(t));
    EXPECT_DOUBLE_EQ(seg.scalar(-1.0), path.scalar(t - 1.0));
  }
}

TEST(Segment, RejectsUncoveredWindows) {
  TimeGrid grid(-1.0, 1.0, 0.25);
  auto path = path_from(grid, +[](double t) { return t; });
  EXPECT_THROW(segment_at(path, -0.5, 1.0), DomainError);
  EXPECT_THROW(segment_at(path, 1.5, 0.5), DomainError);
}

TEST(SupNorm, ZeroSegment) {
  TimeGrid grid(-1.0, 1.0, 0.5);
  auto path = path_from(grid, +[](double) { return 0.0; });
  EXPECT_DOUBLE_EQ(sup_norm(segment_at(path, 0.0, 1.0)), 0.0);
}

TEST(SupNorm, AttainedAtTheOldestPoint) {
  TimeGrid grid(-1.0, 1.0, 0.25);
  auto path = path_from(grid, +[](double t) { return t; });
  EXPECT_DOUBLE_EQ(sup_norm(segment_at(path, 0.0, 1.0)), 1.0);
}

TEST(SupNorm, PiecewiseLinearMaxOverNodes) {
  TimeGrid grid(-1.0, 0.5, 0.5);
  SamplePath path(grid, 1, {2.0, -3.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(sup_norm(segment_at(path, 0.0, 1.0)), 3.0);
}

TEST(SupNorm, InteriorWindowEndpointsAreInterpolated) {
  TimeGrid grid(-1.0, 1.0, 0.5);
  SamplePath path(grid, 1, {0.0, 4.0, 0.0, 0.0, 0.0});
  // window [-0.75, -0.25] covers only the node at -0.5; endpoints interpolate to 2
  EXPECT_DOUBLE_EQ(sup_norm(segment_at(path, -0.25, 0.5)), 4.0);
  SamplePath dip(grid, 1, {0.0, 0.0, 4.0, 0.0, 0.0});
  // window [-1, -0.25]: right endpoint interpolates between 0 and 4
  EXPECT_DOUBLE_EQ(sup_norm(segment_at(dip, -0.25, 0.75)), 2.0);
}

TEST(SupNorm, NormAxiomsOnRandomSegments) {
  std::mt19937 rng(42);
  std::normal_distribution<double> normal(0.0, 2.0);
  TimeGrid grid(-1.0, 0.5, 0.125);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<double> v1(grid.n_nodes()), v2(grid.n_nodes()), sum(grid.n_nodes()),
        scaled(grid.n_nodes());
    const double alpha = normal(rng);
    for (std::size_t j = 0; j < grid.n_nodes(); ++j) {
      v1[j] = normal(rng);
      v2[j] = normal(rng);
      sum[j] = v1[j] + v2[j];
      scaled[j] = alpha * v1[j];
    }
    SamplePath p1(grid, 1, v1), p2(grid, 1, v2), ps(grid, 1, sum), pa(grid, 1, scaled);
    const double n1 = sup_norm(segment_at(p1, 0.0, 1.0));
    const double n2 = sup_norm(segment_at(p2, 0.0, 1.0));
    const double ns = sup_norm(segment_at(ps, 0.0, 1.0));
    const double na = sup_norm(segment_at(pa, 0.0, 1.0));
    EXPECT_LE(ns, n1 + n2 + 1e-12);
    EXPECT_NEAR(na, std::abs(alpha) * n1, 1e-12 * (1.0 + std::abs(alpha)));
  }
}

TEST(SupNorm, WindowShiftBoundedByTwiceTheNodeMax) {
  std::mt19937 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  TimeGrid grid(-2.0, 2.0, 0.125);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> values(grid.n_nodes());
    for (double& v : values) v = normal(rng);
    SamplePath path(grid, 1, values);
    const double L = 1.0;
    const double s = -0.5, t = 1.5;
    double shift_sup = 0.0;
    for (double v = -L; v <= 1e-12; v += 0.0625)
      shift_sup = std::max(shift_sup, std::abs(path.scalar(t + v) - path.scalar(s + v)));
    double node_max = 0.0;
    for (std::size_t j = grid.index_of(s - L); j <= grid.index_of(t); ++j)
      node_max = std::max(node_max, std::abs(path.node(j)[0]));
    EXPECT_LE(shift_sup, 2.0 * node_max + 1e-12);
  }
}

TEST(SamplePath, RejectsNonFiniteValues) {
  TimeGrid grid(0.0, 1.0, 0.5);
  EXPECT_THROW(SamplePath(grid, 1, {0.0, std::nan(""), 1.0}), DomainError);
  EXPECT_THROW(SamplePath(grid, 1, {0.0, 1.0}), ConfigError);
}

// ---------------------------------------------------------------------------
// initial process samplers
// ---------------------------------------------------------------------------

TEST(InitialProcess, SampleRequiresInitialTag) {
  auto proc = constant_initial({1.0}, 1.0);
  EXPECT_THROW(proc.sample({1, 0, StreamTag::brownian}), ConfigError);
  auto fn = proc.sample({1, 0, StreamTag::initial});
  EXPECT_DOUBLE_EQ(eval1(fn, -0.5), 1.0);
}

TEST(InitialProcess, BrownianSamplerIsReproducibleAndPinned) {
  auto proc = brownian_initial(1, 1.0, 2.0, 1.0 / 64.0);
  auto f1 = proc.sample({9, 3, StreamTag::initial});
  auto f2 = proc.sample({9, 3, StreamTag::initial});
  auto g = proc.sample({9, 4, StreamTag::initial});
  EXPECT_DOUBLE_EQ(eval1(f1, -1.0), 0.0);
  bool differs = false;
  for (double v = -1.0; v <= 0.0; v += 0.125) {
    EXPECT_DOUBLE_EQ(eval1(f1, v), eval1(f2, v));
    differs = differs || std::abs(eval1(f1, v) - eval1(g, v)) > 1e-12;
  }
  EXPECT_TRUE(differs);
}

TEST(InitialProcess, BrownianSamplerVarianceMatchesScale) {
  const double scale = 1.5;
  auto proc = brownian_initial(1, 1.0, scale, 1.0 / 64.0);
  RunningMoments acc;
  for (std::size_t i = 0; i < 4000; ++i) {
    auto fn = proc.sample({123, i, StreamTag::initial});
    const double v = eval1(fn, 0.0);  // theta(0) ~ N(0, scale^2 * L)
    acc.add(v * v);
  }
  EXPECT_NEAR(acc.mean(), scale * scale, 0.15 * scale * scale);
}

}  // namespace
}  // namespace memgap
