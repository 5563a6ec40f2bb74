#pragma once

// Run configuration: a YAML file with nested sections. Command-line flags
// override individual keys after parsing.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "infomenu/core_model.hpp"

namespace infomenu {

// Bad configuration. `field` is the dotted key path, `line` 1-based when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message, int line = 0);
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

struct ValueSpec {
  std::string kind = "quadratic";  // quadratic | polynomial | actions | builtin
  double scale = 1.0;
  std::vector<double> coefficients;
  std::vector<Action> actions;
  std::string builtin;  // quadratic | four_action
};

struct DensitySpec {
  std::string kind = "uniform";  // uniform | triangular | tilted | rotation | tabulated
  double slope = 0.0;            // tilted
  double t = 0.0;                // rotation
  std::string base = "uniform";  // rotation base: uniform | triangular
  std::vector<double> knots, values;
};

struct RunConfig {
  ValueSpec value;
  DensitySpec density;

  std::size_t menu_grid = 1001;
  std::size_t assumption_grid = 512;
  std::size_t verify_grid = 2001;

  double verify_tol = 1e-7;
  double revenue_tol = 0.03;       // oracle vs closed-form, relative
  double three_signal_tol = 1e-6;

  double lambda_lo = 0.05;
  double lambda_hi = 0.95;

  std::size_t oracle_types = 21;
  double oracle_type_lo = 0.05;
  double oracle_type_hi = 0.95;
  double oracle_noise_step = 0.1;
  std::uint64_t oracle_budget = 2'000'000;
  std::size_t oracle_restarts = 64;
  bool oracle_fallback = true;
  std::size_t three_signal_types = 7;
  double three_signal_step = 0.125;

  std::vector<double> sweep_t = {0.0, 0.1, 0.2, 0.3, 0.4};
  std::vector<double> sweep_probes = {0.1, 0.15, 0.2, 0.8, 0.85, 0.9};

  std::optional<std::string> verify_menu;  // defaults to <output>/menu.csv
  std::string output = "out";
  std::uint64_t seed = 20240601;
  bool override_assumptions = false;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);
// Checks ranges and cross-field constraints; throws ConfigError.
void validate(const RunConfig& cfg);

ValueFunction make_value_function(const ValueSpec& spec);
BeliefDensity make_density(const DensitySpec& spec);

// The four-action quadratic-loss table with actions 0, 1/3, 2/3, 1.
std::vector<Action> four_action_table();

}  // namespace infomenu
