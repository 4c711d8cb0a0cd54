#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "memgap/brownian.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return MEMGAP_CLI_PATH; }

struct CliResult {
  int exit_code = -1;
  std::string stdout_text;
  std::string stderr_text;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args, const fs::path& dir,
                  const std::string& env_prefix = "") {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = env_prefix + std::string(cli_path()) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.stdout_text = slurp(out);
  result.stderr_text = slurp(err);
  return result;
}

fs::path make_temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("memgap_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

const std::string kSimulateConfig =
    "[model]\n"
    "name = deterministic_dde\n"
    "delay = 1\n"
    "[run]\n"
    "horizon = 2\n"
    "seed = 42\n"
    "substeps = 8\n"
    "[simulate]\n"
    "k = 64\n"
    "paths = 1\n";

const std::string kNoiseConfig =
    "[model]\n"
    "name = pure_noise\n"
    "[run]\n"
    "horizon = 1\n"
    "seed = 7\n"
    "substeps = 8\n"
    "[simulate]\n"
    "k = 8\n"
    "paths = 2\n"
    "dump_increments = true\n";

const std::string kConvergeConfig =
    "[model]\n"
    "name = gbm_l0\n"
    "mu = 0.05\n"
    "sigma = 0.2\n"
    "x0 = 1\n"
    "[run]\n"
    "horizon = 1\n"
    "samples = 50\n"
    "seed = 11\n"
    "k_list = 8,16,32\n"
    "substeps = 8\n"
    "[converge]\n"
    "reference = gbm_closed_form\n";

const std::string kValidateConfig =
    "[model]\n"
    "name = pure_noise\n"
    "[run]\n"
    "horizon = 1\n"
    "samples = 300\n"
    "seed = 5\n"
    "k_list = 2,4,8\n"
    "substeps = 32\n"
    "[validate]\n"
    "lag_levels = 5\n"
    "martingale_samples = 2000\n";

TEST(Cli, SimulateIsByteDeterministic) {
  const fs::path dir = make_temp_dir("determinism");
  write_file(dir / "cfg.ini", kNoiseConfig);
  const auto r1 = run_cli("--config " + (dir / "cfg.ini").string() + " --deterministic --out " +
                              (dir / "run1").string() + " simulate",
                          dir);
  const auto r2 = run_cli("--config " + (dir / "cfg.ini").string() + " --deterministic --out " +
                              (dir / "run2").string() + " simulate",
                          dir);
  ASSERT_EQ(r1.exit_code, 0) << r1.stderr_text;
  ASSERT_EQ(r2.exit_code, 0) << r2.stderr_text;
  for (const char* name : {"path_0000.csv", "path_0001.csv", "increments_0000.bin"}) {
    const std::string a = slurp(dir / "run1" / name);
    const std::string b = slurp(dir / "run2" / name);
    ASSERT_FALSE(a.empty());
    EXPECT_EQ(a, b) << name;
  }
}

TEST(Cli, SimulateEmitsTheMethodOfStepsValue) {
  const fs::path dir = make_temp_dir("dde");
  write_file(dir / "cfg.ini", kSimulateConfig);
  const auto r = run_cli("--config " + (dir / "cfg.ini").string() + " --out " +
                             (dir / "out").string() + " simulate",
                         dir);
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  const std::string csv = slurp(dir / "out" / "path_0000.csv");
  ASSERT_FALSE(csv.empty());
  // last row is t = 2
  const auto pos = csv.rfind("\n2,");
  ASSERT_NE(pos, std::string::npos);
  const double x2 = std::stod(csv.substr(pos + 3));
  // memory gap k = 64 leaves a first-order defect ~ 1/k; squared it clears 1e-3
  EXPECT_NEAR(x2, 3.5, 0.02);
  EXPECT_LE((x2 - 3.5) * (x2 - 3.5), 1e-3);
}

TEST(Cli, SimulatedIncrementDumpRoundTrips) {
  const fs::path dir = make_temp_dir("dump");
  write_file(dir / "cfg.ini", kNoiseConfig);
  const auto r = run_cli("--config " + (dir / "cfg.ini").string() + " --out " +
                             (dir / "out").string() + " simulate",
                         dir);
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  std::ifstream bin(dir / "out" / "increments_0001.bin", std::ios::binary);
  ASSERT_TRUE(bin.good());
  memgap::SeedSpec seed;
  const auto w = memgap::read_increment_dump(bin, &seed);
  EXPECT_EQ(seed.experiment_seed, 7u);
  EXPECT_EQ(seed.path_index, 1u);
  EXPECT_EQ(w.dims(), 1u);
  EXPECT_EQ(w.grid().n_steps(), 64u);  // k * r = 8 * 8 over T = 1
}

TEST(Cli, ConvergeWritesRateCsvDeterministically) {
  const fs::path dir = make_temp_dir("converge");
  write_file(dir / "cfg.ini", kConvergeConfig);
  const auto r1 = run_cli("--config " + (dir / "cfg.ini").string() + " --deterministic --out " +
                              (dir / "a").string() + " converge",
                          dir);
  const auto r2 = run_cli("--config " + (dir / "cfg.ini").string() + " --deterministic --out " +
                              (dir / "b").string() + " converge",
                          dir);
  ASSERT_EQ(r1.exit_code, 0) << r1.stderr_text;
  const std::string a = slurp(dir / "a" / "rate.csv");
  EXPECT_EQ(a, slurp(dir / "b" / "rate.csv"));
  EXPECT_NE(a.find("k,error,std_error"), std::string::npos);
  EXPECT_NE(a.find("slope,intercept,r_squared"), std::string::npos);
  EXPECT_NE(a.find("\n8,"), std::string::npos);
}

TEST(Cli, EmptyKListIsAConfigError) {
  const fs::path dir = make_temp_dir("emptyk");
  const std::string cfg =
      "[model]\nname = gbm_l0\n[run]\nhorizon = 1\nsamples = 10\nseed = 1\n"
      "[converge]\nreference = gbm_closed_form\n";
  write_file(dir / "cfg.ini", cfg);
  const auto r = run_cli("--config " + (dir / "cfg.ini").string() + " --out " +
                             (dir / "out").string() + " converge",
                         dir);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.stderr_text.find("k_list"), std::string::npos);
}

TEST(Cli, MalformedConfigReportsLineAndExitsTwo) {
  const fs::path dir = make_temp_dir("badcfg");
  write_file(dir / "cfg.ini", "[model]\nname = gbm_l0\nwat = 1\n");
  const auto r = run_cli("--config " + (dir / "cfg.ini").string() + " simulate", dir);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.stderr_text.find("line 3"), std::string::npos);
}

TEST(Cli, ValidateSucceedsOnPureNoise) {
  const fs::path dir = make_temp_dir("validate");
  write_file(dir / "cfg.ini", kValidateConfig);
  const auto r = run_cli("--config " + (dir / "cfg.ini").string() + " --out " +
                             (dir / "out").string() + " validate",
                         dir);
  EXPECT_EQ(r.exit_code, 0) << r.stdout_text << r.stderr_text;
  const std::string csv = slurp(dir / "out" / "validation.csv");
  EXPECT_NE(csv.find("name,statistic,bound,result"), std::string::npos);
  EXPECT_NE(csv.find("martingale_k1_g1"), std::string::npos);
  EXPECT_NE(csv.find("gap_closure_margin"), std::string::npos);
  EXPECT_EQ(csv.find(",fail\n"), std::string::npos);
}

TEST(Cli, ForcedFailFixtureExitsOne) {
  const fs::path dir = make_temp_dir("forcefail");
  write_file(dir / "cfg.ini", kValidateConfig + "force_fail = true\n");
  const auto r = run_cli("--config " + (dir / "cfg.ini").string() + " --out " +
                             (dir / "out").string() + " validate",
                         dir);
  EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, OutputDirectoryPrecedence) {
  const fs::path dir = make_temp_dir("outdirs");
  write_file(dir / "cfg.ini", kNoiseConfig + "[output]\ndir = " + (dir / "from_cfg").string() +
                                  "\n");
  // config [output] used when no flag or env is given
  auto r = run_cli("--config " + (dir / "cfg.ini").string() + " simulate", dir);
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  EXPECT_TRUE(fs::exists(dir / "from_cfg" / "path_0000.csv"));
  // MEMGAP_OUT overrides the config
  r = run_cli("--config " + (dir / "cfg.ini").string() + " simulate", dir,
              "MEMGAP_OUT=" + (dir / "from_env").string() + " ");
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  EXPECT_TRUE(fs::exists(dir / "from_env" / "path_0000.csv"));
  // --out beats both
  r = run_cli("--config " + (dir / "cfg.ini").string() + " --out " +
                  (dir / "from_flag").string() + " simulate",
              dir, "MEMGAP_OUT=" + (dir / "from_env2").string() + " ");
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  EXPECT_TRUE(fs::exists(dir / "from_flag" / "path_0000.csv"));
  EXPECT_FALSE(fs::exists(dir / "from_env2"));
}

TEST(Cli, PathFileCarriesTheGridHeader) {
  const fs::path dir = make_temp_dir("header");
  write_file(dir / "cfg.ini", kSimulateConfig);
  const auto r = run_cli("--config " + (dir / "cfg.ini").string() + " --out " +
                             (dir / "out").string() + " simulate",
                         dir);
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  const std::string csv = slurp(dir / "out" / "path_0000.csv");
  EXPECT_EQ(csv.rfind("d,dt_fine,t_start,t_end\n", 0), 0u);
  EXPECT_NE(csv.find("\n1,0.001953125,-2,2\n"), std::string::npos);
  EXPECT_NE(csv.find("t,x_1\n"), std::string::npos);
}

}  // namespace
