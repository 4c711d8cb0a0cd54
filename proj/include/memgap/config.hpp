#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "memgap/errors.hpp"
#include "memgap/format.hpp"

namespace memgap {

/// One experiment, fully specified by a flat key = value file with sections.
/// Round-trips losslessly through serialize_config/parse_config so a written
/// config is a complete, reproducible record of a run.
struct ExperimentConfig {
  // [model]
  std::string model = "point_delay_linear";
  double a = 1.0;
  double b = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double x0 = 1.0;
  std::size_t dim = 1;
  double delay = 0.0;
  std::string theta = "default";  // default | constant | brownian | zero
  double theta_value = 1.0;
  double theta_scale = 1.0;

  // [run]
  double horizon = 1.0;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  std::vector<std::size_t> k_list;
  std::size_t k_ref = 0;
  std::string step_policy = "fixed_substeps";  // fixed_substeps | fixed_product
  std::size_t substeps = 8;

  // [simulate]
  std::size_t sim_k = 8;
  std::size_t sim_paths = 1;
  std::string sim_variant = "standard";  // standard | alternative
  bool dump_increments = false;

  // [converge]
  std::string reference = "self";  // self | dde_oracle | gbm_closed_form

  // [validate]
  std::vector<int> gamma_list{1, 2};
  std::size_t lag_levels = 6;
  std::size_t martingale_samples = 10000;
  bool force_fail = false;

  // [output]
  std::string out_dir;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ConfigParser {
  std::size_t line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line_no) + ": " + msg);
  }

  double as_double(const std::string& v) const {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) fail("trailing characters in number '" + v + "'");
      return d;
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      fail("expected a number, got '" + v + "'");
    }
  }

  std::uint64_t as_uint(const std::string& v) const {
    try {
      std::size_t pos = 0;
      const auto u = std::stoull(v, &pos);
      if (pos != v.size()) fail("trailing characters in integer '" + v + "'");
      return u;
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      fail("expected a nonnegative integer, got '" + v + "'");
    }
  }

  bool as_bool(const std::string& v) const {
    if (v == "true") return true;
    if (v == "false") return false;
    fail("expected true or false, got '" + v + "'");
  }

  template <class T>
  std::vector<T> as_list(const std::string& v) const {
    std::vector<T> out;
    std::string item;
    std::stringstream ss(v);
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) fail("empty list element");
      out.push_back(static_cast<T>(as_uint(item)));
    }
    return out;
  }
};

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  cfg.k_list.clear();
  cfg.gamma_list.clear();
  detail::ConfigParser p;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  bool saw_gamma = false;
  while (std::getline(in, raw)) {
    ++p.line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "run" && section != "simulate" &&
          section != "converge" && section != "validate" && section != "output")
        p.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) p.fail("empty key");
    if (value.empty()) p.fail("empty value for key '" + key + "'");
    if (section.empty()) p.fail("key '" + key + "' outside any section");

    if (section == "model") {
      if (key == "name") cfg.model = value;
      else if (key == "a") cfg.a = p.as_double(value);
      else if (key == "b") cfg.b = p.as_double(value);
      else if (key == "mu") cfg.mu = p.as_double(value);
      else if (key == "sigma") cfg.sigma = p.as_double(value);
      else if (key == "x0") cfg.x0 = p.as_double(value);
      else if (key == "dim") cfg.dim = static_cast<std::size_t>(p.as_uint(value));
      else if (key == "delay") cfg.delay = p.as_double(value);
      else if (key == "theta") cfg.theta = value;
      else if (key == "theta_value") cfg.theta_value = p.as_double(value);
      else if (key == "theta_scale") cfg.theta_scale = p.as_double(value);
      else p.fail("unknown key '" + key + "' in [model]");
    } else if (section == "run") {
      if (key == "horizon") cfg.horizon = p.as_double(value);
      else if (key == "samples") cfg.samples = static_cast<std::size_t>(p.as_uint(value));
      else if (key == "seed") cfg.seed = p.as_uint(value);
      else if (key == "k_list") cfg.k_list = p.as_list<std::size_t>(value);
      else if (key == "k_ref") cfg.k_ref = static_cast<std::size_t>(p.as_uint(value));
      else if (key == "step_policy") cfg.step_policy = value;
      else if (key == "substeps") cfg.substeps = static_cast<std::size_t>(p.as_uint(value));
      else p.fail("unknown key '" + key + "' in [run]");
    } else if (section == "simulate") {
      if (key == "k") cfg.sim_k = static_cast<std::size_t>(p.as_uint(value));
      else if (key == "paths") cfg.sim_paths = static_cast<std::size_t>(p.as_uint(value));
      else if (key == "variant") cfg.sim_variant = value;
      else if (key == "dump_increments") cfg.dump_increments = p.as_bool(value);
      else p.fail("unknown key '" + key + "' in [simulate]");
    } else if (section == "converge") {
      if (key == "reference") cfg.reference = value;
      else p.fail("unknown key '" + key + "' in [converge]");
    } else if (section == "validate") {
      if (key == "gamma_list") {
        cfg.gamma_list = p.as_list<int>(value);
        saw_gamma = true;
      } else if (key == "lag_levels") {
        cfg.lag_levels = static_cast<std::size_t>(p.as_uint(value));
      } else if (key == "martingale_samples") {
        cfg.martingale_samples = static_cast<std::size_t>(p.as_uint(value));
      } else if (key == "force_fail") {
        cfg.force_fail = p.as_bool(value);
      } else {
        p.fail("unknown key '" + key + "' in [validate]");
      }
    } else {  // output
      if (key == "dir") cfg.out_dir = value;
      else p.fail("unknown key '" + key + "' in [output]");
    }
  }
  if (!saw_gamma) cfg.gamma_list = {1, 2};

  // structural validation, independent of line numbers
  if (cfg.theta != "default" && cfg.theta != "constant" && cfg.theta != "brownian" &&
      cfg.theta != "zero")
    throw ConfigError("config: unknown theta kind '" + cfg.theta + "'");
  if (cfg.step_policy != "fixed_substeps" && cfg.step_policy != "fixed_product")
    throw ConfigError("config: unknown step_policy '" + cfg.step_policy + "'");
  if (cfg.reference != "self" && cfg.reference != "dde_oracle" &&
      cfg.reference != "gbm_closed_form")
    throw ConfigError("config: unknown reference '" + cfg.reference + "'");
  if (cfg.sim_variant != "standard" && cfg.sim_variant != "alternative")
    throw ConfigError("config: unknown variant '" + cfg.sim_variant + "'");
  if (!(cfg.horizon > 0.0)) throw ConfigError("config: horizon must be positive");
  if (cfg.delay < 0.0) throw ConfigError("config: delay must be nonnegative");
  if (cfg.substeps == 0) throw ConfigError("config: substeps must be positive");
  for (std::size_t i = 0; i + 1 < cfg.k_list.size(); ++i)
    if (cfg.k_list[i + 1] <= cfg.k_list[i])
      throw ConfigError("config: k_list must be strictly increasing");
  return cfg;
}

inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  auto num = [](double v) { return format_g17(v); };
  os << "[model]\n";
  os << "name = " << c.model << "\n";
  os << "a = " << num(c.a) << "\n";
  os << "b = " << num(c.b) << "\n";
  os << "mu = " << num(c.mu) << "\n";
  os << "sigma = " << num(c.sigma) << "\n";
  os << "x0 = " << num(c.x0) << "\n";
  os << "dim = " << c.dim << "\n";
  os << "delay = " << num(c.delay) << "\n";
  os << "theta = " << c.theta << "\n";
  os << "theta_value = " << num(c.theta_value) << "\n";
  os << "theta_scale = " << num(c.theta_scale) << "\n";
  os << "\n[run]\n";
  os << "horizon = " << num(c.horizon) << "\n";
  os << "samples = " << c.samples << "\n";
  os << "seed = " << c.seed << "\n";
  if (!c.k_list.empty()) {
    os << "k_list = ";
    for (std::size_t i = 0; i < c.k_list.size(); ++i)
      os << (i ? "," : "") << c.k_list[i];
    os << "\n";
  }
  os << "k_ref = " << c.k_ref << "\n";
  os << "step_policy = " << c.step_policy << "\n";
  os << "substeps = " << c.substeps << "\n";
  os << "\n[simulate]\n";
  os << "k = " << c.sim_k << "\n";
  os << "paths = " << c.sim_paths << "\n";
  os << "variant = " << c.sim_variant << "\n";
  os << "dump_increments = " << (c.dump_increments ? "true" : "false") << "\n";
  os << "\n[converge]\n";
  os << "reference = " << c.reference << "\n";
  os << "\n[validate]\n";
  if (!c.gamma_list.empty()) {
    os << "gamma_list = ";
    for (std::size_t i = 0; i < c.gamma_list.size(); ++i)
      os << (i ? "," : "") << c.gamma_list[i];
    os << "\n";
  }
  os << "lag_levels = " << c.lag_levels << "\n";
  os << "martingale_samples = " << c.martingale_samples << "\n";
  os << "force_fail = " << (c.force_fail ? "true" : "false") << "\n";
  if (!c.out_dir.empty()) {
    os << "\n[output]\n";
    os << "dir = " << c.out_dir << "\n";
  }
  return os.str();
}

}  // namespace memgap
