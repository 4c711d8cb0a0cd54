#include <gtest/gtest.h>

#include <string>

#include "memgap/config.hpp"

namespace memgap {
namespace {

TEST(Config, RoundTripsLosslessly) {
  ExperimentConfig cfg;
  cfg.model = "point_delay_linear";
  cfg.a = 1.5;
  cfg.b = 0.1;
  cfg.delay = 1.0;
  cfg.theta = "brownian";
  cfg.theta_scale = 0.75;
  cfg.horizon = 2.0;
  cfg.samples = 500;
  cfg.seed = 987654321;
  cfg.k_list = {4, 8, 16, 32};
  cfg.k_ref = 256;
  cfg.step_policy = "fixed_product";
  cfg.substeps = 2048;
  cfg.sim_k = 64;
  cfg.dump_increments = true;
  cfg.reference = "self";
  cfg.gamma_list = {1, 2};
  cfg.lag_levels = 7;
  cfg.out_dir = "results/run1";
  cfg.x0 = 1.0 / 3.0;  // exercise a non-terminating decimal
  const std::string text = serialize_config(cfg);
  const ExperimentConfig parsed = parse_config(text);
  EXPECT_EQ(parsed, cfg);
  EXPECT_EQ(serialize_config(parsed), text);
}

TEST(Config, DefaultsSurviveRoundTrip) {
  const ExperimentConfig cfg;
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
}

TEST(Config, ReportsLinePreciseErrors) {
  const std::string text =
      "[model]\n"
      "name = gbm_l0\n"
      "volatility = 0.2\n";
  try {
    parse_config(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("volatility"), std::string::npos);
  }
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("[nope]\n"), ConfigError);
  EXPECT_THROW(parse_config("[model]\nname point_delay\n"), ConfigError);
  EXPECT_THROW(parse_config("[model]\na = fast\n"), ConfigError);
  EXPECT_THROW(parse_config("a = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[run]\nk_list = 8,4\n"), ConfigError);
  EXPECT_THROW(parse_config("[run]\nhorizon = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("[model]\ntheta = fancy\n"), ConfigError);
}

TEST(Config, CommentsAndBlankLinesAreIgnored) {
  const std::string text =
      "# experiment\n"
      "\n"
      "[model]\n"
      "name = pure_noise   # trailing comment\n"
      "[run]\n"
      "horizon = 1\n";
  const ExperimentConfig cfg = parse_config(text);
  EXPECT_EQ(cfg.model, "pure_noise");
  EXPECT_DOUBLE_EQ(cfg.horizon, 1.0);
}

TEST(FormatG17, RoundTripsDoubles) {
  for (double v : {1.0 / 3.0, 0.1, 1e-17, 123456789.123456789, -2.5e300}) {
    const double back = std::stod(format_g17(v));
    EXPECT_EQ(back, v);
  }
}

}  // namespace
}  // namespace memgap
