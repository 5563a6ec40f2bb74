#include "infomenu/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "infomenu/comparative.hpp"

namespace infomenu {

ConfigError::ConfigError(std::string field, const std::string& message, int line)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + field + ": " + message),
      field_(std::move(field)),
      line_(line) {}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

template <class T>
T scalar(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(field, "expected a scalar", line_of(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "cannot read '" + n.Scalar() + "'", line_of(n));
  }
}

template <class T>
void read(const YAML::Node& parent, const char* key, const std::string& section, T& out) {
  const auto n = parent[key];
  if (!n) return;
  out = scalar<T>(n, section.empty() ? key : section + "." + key);
}

std::vector<double> read_list(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) throw ConfigError(field, "expected a list of numbers", line_of(n));
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(scalar<double>(n[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

void check_keys(const YAML::Node& n, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!n.IsMap()) throw ConfigError(section, "expected a mapping", line_of(n));
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(section.empty() ? key : section + "." + key, "unknown key", line_of(kv.first));
  }
}

RunConfig from_node(const YAML::Node& root) {
  RunConfig cfg;
  if (!root || root.IsNull()) return cfg;
  check_keys(root, "", {"value_function", "density", "grid", "tolerances", "lambda", "oracle", "sweep", "verify",
                        "output", "seed", "override_assumptions"});

  if (const auto n = root["value_function"]) {
    check_keys(n, "value_function", {"kind", "scale", "coefficients", "actions", "name"});
    read(n, "kind", "value_function", cfg.value.kind);
    read(n, "scale", "value_function", cfg.value.scale);
    read(n, "name", "value_function", cfg.value.builtin);
    if (const auto c = n["coefficients"]) cfg.value.coefficients = read_list(c, "value_function.coefficients");
    if (const auto a = n["actions"]) {
      if (!a.IsSequence()) throw ConfigError("value_function.actions", "expected a list of [u_l, u_h] pairs", line_of(a));
      for (std::size_t i = 0; i < a.size(); ++i) {
        const auto field = "value_function.actions[" + std::to_string(i) + "]";
        const auto pair = read_list(a[i], field);
        if (pair.size() != 2) throw ConfigError(field, "expected [u_l, u_h]", line_of(a[i]));
        cfg.value.actions.push_back({pair[0], pair[1]});
      }
    }
  }
  if (const auto n = root["density"]) {
    check_keys(n, "density", {"kind", "slope", "t", "base", "knots", "values"});
    read(n, "kind", "density", cfg.density.kind);
    read(n, "slope", "density", cfg.density.slope);
    read(n, "t", "density", cfg.density.t);
    read(n, "base", "density", cfg.density.base);
    if (const auto k = n["knots"]) cfg.density.knots = read_list(k, "density.knots");
    if (const auto v = n["values"]) cfg.density.values = read_list(v, "density.values");
  }
  if (const auto n = root["grid"]) {
    check_keys(n, "grid", {"menu", "assumptions", "verify"});
    read(n, "menu", "grid", cfg.menu_grid);
    read(n, "assumptions", "grid", cfg.assumption_grid);
    read(n, "verify", "grid", cfg.verify_grid);
  }
  if (const auto n = root["tolerances"]) {
    check_keys(n, "tolerances", {"verify", "revenue", "three_signal"});
    read(n, "verify", "tolerances", cfg.verify_tol);
    read(n, "revenue", "tolerances", cfg.revenue_tol);
    read(n, "three_signal", "tolerances", cfg.three_signal_tol);
  }
  if (const auto n = root["lambda"]) {
    check_keys(n, "lambda", {"lo", "hi"});
    read(n, "lo", "lambda", cfg.lambda_lo);
    read(n, "hi", "lambda", cfg.lambda_hi);
  }
  if (const auto n = root["oracle"]) {
    check_keys(n, "oracle", {"types", "type_lo", "type_hi", "noise_step", "budget", "restarts", "fallback",
                             "three_signal_types", "three_signal_step"});
    read(n, "types", "oracle", cfg.oracle_types);
    read(n, "type_lo", "oracle", cfg.oracle_type_lo);
    read(n, "type_hi", "oracle", cfg.oracle_type_hi);
    read(n, "noise_step", "oracle", cfg.oracle_noise_step);
    read(n, "budget", "oracle", cfg.oracle_budget);
    read(n, "restarts", "oracle", cfg.oracle_restarts);
    read(n, "fallback", "oracle", cfg.oracle_fallback);
    read(n, "three_signal_types", "oracle", cfg.three_signal_types);
    read(n, "three_signal_step", "oracle", cfg.three_signal_step);
  }
  if (const auto n = root["sweep"]) {
    check_keys(n, "sweep", {"t", "probes"});
    if (const auto t = n["t"]) cfg.sweep_t = read_list(t, "sweep.t");
    if (const auto p = n["probes"]) cfg.sweep_probes = read_list(p, "sweep.probes");
  }
  if (const auto n = root["verify"]) {
    check_keys(n, "verify", {"menu"});
    std::string menu;
    read(n, "menu", "verify", menu);
    if (!menu.empty()) cfg.verify_menu = menu;
  }
  read(root, "output", "", cfg.output);
  read(root, "seed", "", cfg.seed);
  read(root, "override_assumptions", "", cfg.override_assumptions);
  return cfg;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<document>", e.msg, e.mark.line + 1);
  }
  RunConfig cfg = from_node(root);
  validate(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate(const RunConfig& cfg) {
  auto positive = [](double x, const char* field) {
    if (!(x > 0.0)) throw ConfigError(field, "must be > 0");
  };
  auto grid = [](std::size_t n, const char* field) {
    if (n < 64) throw ConfigError(field, "grid sizes must be at least 64");
  };
  positive(cfg.verify_tol, "tolerances.verify");
  positive(cfg.revenue_tol, "tolerances.revenue");
  positive(cfg.three_signal_tol, "tolerances.three_signal");
  grid(cfg.menu_grid, "grid.menu");
  grid(cfg.assumption_grid, "grid.assumptions");
  grid(cfg.verify_grid, "grid.verify");
  if (!(cfg.lambda_lo > 0.0 && cfg.lambda_lo < cfg.lambda_hi && cfg.lambda_hi < 1.0)) {
    throw ConfigError("lambda", "need 0 < lo < hi < 1");
  }
  if (cfg.oracle_types == 0) throw ConfigError("oracle.types", "must be at least 1");
  if (!(0.0 <= cfg.oracle_type_lo && cfg.oracle_type_lo <= cfg.oracle_type_hi && cfg.oracle_type_hi <= 1.0)) {
    throw ConfigError("oracle.type_lo", "need 0 <= type_lo <= type_hi <= 1");
  }
  if (!(cfg.oracle_noise_step > 0.0 && cfg.oracle_noise_step < 1.0)) {
    throw ConfigError("oracle.noise_step", "must lie in (0,1)");
  }
  if (!(cfg.three_signal_step > 0.0 && cfg.three_signal_step < 1.0)) {
    throw ConfigError("oracle.three_signal_step", "must lie in (0,1)");
  }
  for (double t : cfg.sweep_t) {
    if (t < 0.0) throw ConfigError("sweep.t", "rotation parameters must be non-negative");
  }
  for (double p : cfg.sweep_probes) {
    if (p < 0.0 || p > 1.0) throw ConfigError("sweep.probes", "probes must lie in [0,1]");
  }
  const auto& k = cfg.value.kind;
  if (k != "quadratic" && k != "polynomial" && k != "actions" && k != "builtin") {
    throw ConfigError("value_function.kind", "unknown kind '" + k + "'");
  }
  if (k == "polynomial" && cfg.value.coefficients.empty()) {
    throw ConfigError("value_function.coefficients", "required for kind polynomial");
  }
  if (k == "actions" && cfg.value.actions.empty()) throw ConfigError("value_function.actions", "required for kind actions");
  if (k == "builtin" && cfg.value.builtin != "quadratic" && cfg.value.builtin != "four_action") {
    throw ConfigError("value_function.name", "unknown builtin '" + cfg.value.builtin + "'");
  }
  const auto& d = cfg.density.kind;
  if (d != "uniform" && d != "triangular" && d != "tilted" && d != "rotation" && d != "tabulated") {
    throw ConfigError("density.kind", "unknown kind '" + d + "'");
  }
  if (d == "rotation" && cfg.density.base != "uniform" && cfg.density.base != "triangular") {
    throw ConfigError("density.base", "rotation base must be uniform or triangular");
  }
}

std::vector<Action> four_action_table() {
  // Quadratic loss -(a - s)^2 for actions a in {0, 1/3, 2/3, 1}.
  std::vector<Action> out;
  for (int k = 0; k <= 3; ++k) {
    const double a = k / 3.0;
    out.push_back({-a * a, -(1.0 - a) * (1.0 - a)});
  }
  return out;
}

ValueFunction make_value_function(const ValueSpec& spec) {
  if (spec.kind == "quadratic") return ValueFunction::quadratic(spec.scale);
  if (spec.kind == "polynomial") return ValueFunction::polynomial(spec.coefficients);
  if (spec.kind == "actions") return ValueFunction::from_actions(spec.actions);
  if (spec.builtin == "four_action") return ValueFunction::from_actions(four_action_table());
  return ValueFunction::quadratic(1.0);
}

BeliefDensity make_density(const DensitySpec& spec) {
  if (spec.kind == "uniform") return BeliefDensity::uniform();
  if (spec.kind == "triangular") return BeliefDensity::triangular();
  if (spec.kind == "tilted") return BeliefDensity::tilted(spec.slope);
  if (spec.kind == "tabulated") return BeliefDensity::piecewise_linear(spec.knots, spec.values);
  const auto base = spec.base == "triangular" ? BeliefDensity::triangular() : BeliefDensity::uniform();
  return rotation_density(base, spec.t);
}

}  // namespace infomenu
