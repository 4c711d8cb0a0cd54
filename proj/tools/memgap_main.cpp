#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "memgap/memgap.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw memgap::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path resolve_out_dir(const std::string& flag_value,
                                      const memgap::ExperimentConfig& cfg) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("MEMGAP_OUT"); env != nullptr && *env != '\0') return env;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  return "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memory-gap scheme for stochastic functional differential equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_flag;
  unsigned workers = 1;
  bool deterministic = false;
  app.add_option("--config", config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_flag, "output directory (overrides config and MEMGAP_OUT)");
  app.add_option("--workers", workers, "Monte Carlo worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", deterministic,
               "sequential reduction for bit-reproducible output");

  auto* simulate = app.add_subcommand("simulate", "write sample paths");
  auto* converge = app.add_subcommand("converge", "strong-error sweep and rate fit");
  auto* validate = app.add_subcommand("validate", "run the property suite");

  CLI11_PARSE(app, argc, argv);

  try {
    const memgap::ExperimentConfig cfg = memgap::parse_config(read_file(config_path));
    const std::filesystem::path out_dir = resolve_out_dir(out_flag, cfg);
    memgap::RunOptions options;
    options.workers = deterministic ? 1 : workers;
    if (simulate->parsed()) return memgap::run_simulate(cfg, out_dir, options);
    if (converge->parsed()) return memgap::run_converge(cfg, out_dir, options);
    if (validate->parsed()) return memgap::run_validate(cfg, out_dir, options);
    std::cerr << "error: no subcommand\n";
    return memgap::kExitConfigError;
  } catch (const memgap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return memgap::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return memgap::kExitConfigError;
  }
}
