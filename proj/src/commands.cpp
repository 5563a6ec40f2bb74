#include "infomenu/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "infomenu/comparative.hpp"
#include "infomenu/errors.hpp"
#include "infomenu/reports.hpp"

namespace infomenu {

using nlohmann::ordered_json;

namespace {

class Stopwatch {
 public:
  void lap(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    laps_[name] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  void write(const std::string& dir) const {
    ordered_json j = laps_;
    j["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    atomic_write(dir + "/timings.json", j.dump(2) + "\n");
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  std::chrono::steady_clock::time_point last_ = start_;
  ordered_json laps_ = ordered_json::object();
};

std::string path_in(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output) / name).string();
}

void write_json(const RunConfig& cfg, const std::string& name, const ordered_json& j) {
  atomic_write(path_in(cfg, name), j.dump(2) + "\n");
}

ordered_json header(const RunConfig& cfg, const char* command) {
  ordered_json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = to_json(cfg);
  return j;
}

ordered_json reports_json(const std::vector<AssumptionReport>& reports) {
  ordered_json j = ordered_json::array();
  for (const auto& r : reports) j.push_back(to_json(r));
  return j;
}

bool gating_pass(const std::vector<AssumptionReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const AssumptionReport& r) {
    return r.pass || r.condition.find("(diagnostic)") != std::string::npos;
  });
}

BeliefDensity sweep_base(const RunConfig& cfg) {
  if (cfg.density.kind == "rotation") {
    DensitySpec base;
    base.kind = cfg.density.base;
    return make_density(base);
  }
  return make_density(cfg.density);
}

}  // namespace

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.out) cfg.output = *o.out;
  if (o.grid) cfg.menu_grid = *o.grid;
  if (o.tol) cfg.verify_tol = *o.tol;
  if (o.seed) cfg.seed = *o.seed;
  if (o.override_assumptions) cfg.override_assumptions = true;
  validate(cfg);
}

MenuOptions menu_options(const RunConfig& cfg) {
  MenuOptions m;
  m.grid = cfg.menu_grid;
  m.lambda_lo = cfg.lambda_lo;
  m.lambda_hi = cfg.lambda_hi;
  m.override_assumptions = cfg.override_assumptions;
  m.assumption_grid = cfg.assumption_grid;
  return m;
}

Restriction closed_form_restriction(const OptimalMenu& menu, const DiscreteInstance& inst, const ValueFunction& v,
                                    const BeliefDensity& f, double tol) {
  Restriction r;
  std::vector<double> beliefs;
  std::vector<std::size_t> own;
  for (std::size_t j = 0; j < inst.types.size(); ++j) {
    const double mu = inst.types[j].belief;
    MenuContract c{contract_at(mu, menu.thresholds, v, f), menu.price_at(mu)};
    if (c.experiment.orientation == Orientation::null) c.price = 0.0;
    r.revenue += inst.types[j].weight * c.price;
    r.contracts.push_back(c);
    beliefs.push_back(mu);
    own.push_back(j);
  }
  r.feasibility = verify_ic_ir(r.contracts, beliefs, own, v, tol);
  return r;
}

// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
  Stopwatch clock;
  const auto v = make_value_function(cfg.value);
  const auto f = make_density(cfg.density);
  const auto menu = build_menu(v, f, menu_options(cfg));
  clock.lap("build_menu");
  const auto ic = verify_ic_ir(menu, v, cfg.verify_tol);
  clock.lap("verify_ic_ir");
  const auto flat = flat_price_optimum(v, f);
  clock.lap("flat_price");

  const std::string csv_path = path_in(cfg, "menu.csv");
  atomic_write(csv_path, menu_csv(menu.records));
  write_json(cfg, "thresholds.json", to_json(menu.thresholds));
  atomic_write(path_in(cfg, "menu.svg"), menu_svg_from_csv(read_file(csv_path)));

  ordered_json rep = header(cfg, "solve");
  rep["thresholds"] = to_json(menu.thresholds);
  rep["revenue"] = menu.revenue;
  rep["flat_price"] = to_json(flat);
  rep["revenue_over_flat"] = menu.revenue - flat.revenue;
  rep["assumptions"] = reports_json(menu.assumptions);
  rep["verification"] = to_json(ic);
  rep["warnings"] = menu.warnings;
  rep["records"] = menu.records.size();
  write_json(cfg, "report.json", rep);
  clock.lap("write");
  clock.write(cfg.output);

  log << "lambda " << format_number(menu.thresholds.lambda) << "\n"
      << "mu_minus " << format_number(menu.thresholds.mu_minus) << "  mu0 " << format_number(menu.thresholds.mu0)
      << "  mu_plus " << format_number(menu.thresholds.mu_plus) << "\n"
      << "exclusion " << format_number(menu.thresholds.exclusion_lo) << " "
      << format_number(menu.thresholds.exclusion_hi) << "\n"
      << "revenue " << format_number(menu.revenue) << "  flat " << format_number(flat.revenue) << "\n"
      << "IC/IR " << (ic.pass ? "pass" : "FAIL") << " worst " << format_number(ic.worst_violation) << "\n";
  for (const auto& w : menu.warnings) log << "warning: " << w << "\n";
  log << "wrote " << cfg.output << "/{menu.csv,thresholds.json,report.json,menu.svg}\n";
  return ic.pass ? kExitOk : kExitVerifyFailed;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  Stopwatch clock;
  const auto v = make_value_function(cfg.value);
  const auto f = make_density(cfg.density);
  const std::string menu_path = cfg.verify_menu.value_or(path_in(cfg, "menu.csv"));
  const auto records = parse_menu_csv(read_file(menu_path));
  clock.lap("read");

  std::vector<MenuContract> contracts;
  std::vector<double> beliefs;
  std::vector<std::size_t> own;
  for (std::size_t i = 0; i < records.size(); ++i) {
    contracts.push_back({records[i].contract, records[i].price});
    beliefs.push_back(records[i].mu);
    own.push_back(i);
  }
  const auto ic = verify_ic_ir(contracts, beliefs, own, v, cfg.verify_tol);
  clock.lap("verify_ic_ir");

  ordered_json rep = header(cfg, "verify");
  rep["menu"] = menu_path;
  rep["records"] = records.size();
  rep["revenue"] = revenue(records, f);
  rep["verification"] = to_json(ic);
  bool ok = ic.pass;
  if (v.kind() == ValueKind::smooth) {
    const double lambda = solve_lambda(v, f, menu_options(cfg));
    const auto t = menu_thresholds(lambda, v, f);
    const auto reports = check_assumptions(v, f, t, cfg.assumption_grid);
    rep["assumptions"] = reports_json(reports);
    ok = ok && gating_pass(reports);
  } else {
    rep["assumptions"] = "not applicable: value function is an action table";
  }
  clock.lap("assumptions");
  rep["pass"] = ok;
  write_json(cfg, "verify.json", rep);
  clock.write(cfg.output);

  log << "records " << records.size() << "  revenue " << format_number(rep["revenue"].get<double>()) << "\n";
  if (ic.pass) {
    log << "IC/IR pass, worst " << format_number(ic.worst_violation) << "\n";
  } else {
    log << ic.kind << " violation " << format_number(ic.worst_violation) << " at mu " << format_number(ic.mu);
    if (ic.deviation) log << " deviating to row " << *ic.deviation << " (mu " << format_number(records[*ic.deviation].mu) << ")";
    log << "\n";
  }
  log << (ok ? "verify: pass" : "verify: FAIL") << "\n";
  return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& log) {
  Stopwatch clock;
  const auto v = make_value_function(cfg.value);
  const auto f = make_density(cfg.density);
  const auto inst =
      make_instance(uniform_types(cfg.oracle_types, cfg.oracle_type_lo, cfg.oracle_type_hi),
                    simple_catalog(cfg.oracle_noise_step), v);
  OracleOptions opts;
  opts.budget = cfg.oracle_budget;
  opts.restarts = cfg.oracle_restarts;
  opts.seed = cfg.seed;
  const auto mech = brute_force_optimal(inst, opts);
  clock.lap("brute_force");
  if (!mech.exhaustive && !cfg.oracle_fallback) {
    throw BudgetExceeded("branch and bound exceeded " + std::to_string(cfg.oracle_budget) +
                         " nodes; set oracle.fallback: true to accept the local-search result");
  }
  const auto ic = verify_ic_ir(inst, mech, cfg.verify_tol);

  ordered_json rep = header(cfg, "oracle");
  rep["instance"] = to_json(inst);
  rep["mechanism"] = to_json(inst, mech);
  rep["mechanism_ic_ir"] = to_json(ic);
  bool ok = ic.pass;

  std::optional<double> mu0;
  if (v.kind() == ValueKind::smooth) {
    try {
      const auto menu = build_menu(v, f, menu_options(cfg));
      mu0 = menu.thresholds.mu0;
      const auto r = closed_form_restriction(menu, inst, v, f, cfg.verify_tol);
      const double rel = r.revenue > 0.0 ? std::abs(mech.revenue - r.revenue) / r.revenue : 0.0;
      ordered_json c;
      c["closed_form_revenue"] = r.revenue;
      c["oracle_revenue"] = mech.revenue;
      c["relative_gap"] = rel;
      c["tolerance"] = cfg.revenue_tol;
      c["within_tolerance"] = rel <= cfg.revenue_tol;
      c["restriction_feasible"] = to_json(r.feasibility);
      rep["closed_form"] = c;
      ok = ok && rel <= cfg.revenue_tol && r.feasibility.pass;
      log << "closed-form restriction " << format_number(r.revenue) << "  relative gap " << format_number(rel)
          << (rel <= cfg.revenue_tol ? " (within " : " (EXCEEDS ") << cfg.revenue_tol << ")\n"
          << "restriction IC/IR " << (r.feasibility.pass ? "pass" : "FAIL") << "\n";
    } catch (const AssumptionRefusal& e) {
      rep["closed_form"] = std::string("unavailable: ") + e.what();
    }
  } else {
    rep["closed_form"] = "unavailable: value function is an action table";
  }
  clock.lap("closed_form");

  if (!mu0) mu0 = f.quantile(0.5);
  const auto pattern = revealed_state_pattern(inst, mech, *mu0);
  rep["revealed_state_pattern"] = {{"applicable", pattern.applicable},
                                   {"pass", pattern.pass},
                                   {"offending_belief", pattern.offending_belief
                                                            ? ordered_json(*pattern.offending_belief)
                                                            : ordered_json(nullptr)},
                                   {"detail", pattern.detail}};
  ok = ok && (!pattern.applicable || pattern.pass);
  clock.lap("pattern");

  const auto base = make_instance(uniform_types(cfg.three_signal_types, cfg.three_signal_step,
                                                1.0 - cfg.three_signal_step),
                                  simple_catalog(cfg.three_signal_step), v);
  const auto three = three_signal_no_improvement(base, cfg.three_signal_step, cfg.three_signal_tol, opts);
  rep["three_signal"] = {{"base_revenue", three.base_revenue},
                         {"extended_revenue", three.extended_revenue},
                         {"gain", three.gain},
                         {"tolerance", cfg.three_signal_tol},
                         {"pass", three.pass},
                         {"base_exhaustive", three.base_exhaustive},
                         {"extended_exhaustive", three.extended_exhaustive},
                         {"base_catalog", three.base_catalog},
                         {"extended_catalog", three.extended_catalog}};
  ok = ok && three.pass;
  clock.lap("three_signal");
  rep["pass"] = ok;
  write_json(cfg, "oracle.json", rep);
  clock.write(cfg.output);

  log << "oracle revenue " << format_number(mech.revenue) << " (" << mech.mode << ", " << mech.nodes
      << " nodes)\n"
      << "pattern " << (pattern.pass ? "pass" : "FAIL") << "\n"
      << "three-signal gain " << format_number(three.gain) << (three.pass ? " pass" : " FAIL") << "\n"
      << (ok ? "oracle: pass" : "oracle: FAIL") << "\n";
  return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  Stopwatch clock;
  const auto v = make_value_function(cfg.value);
  const auto base = sweep_base(cfg);
  const double t_max = rotation_max_t(base);
  for (double t : cfg.sweep_t) {
    if (t > t_max) {
      throw DomainError("rotation parameter " + format_number(t) + " is infeasible; largest feasible t is " +
                        format_number(t_max));
    }
  }
  const auto sweep = solve_family(base, cfg.sweep_t, v, menu_options(cfg));
  clock.lap("solve_family");
  for (const auto& m : sweep.members) {
    if (!m.ok) throw std::runtime_error("member t = " + format_number(m.t) + " failed: " + m.error);
  }

  const std::string csv_path = path_in(cfg, "sweep.csv");
  atomic_write(csv_path, sweep_csv(sweep));
  atomic_write(path_in(cfg, "sweep.svg"), sweep_svg_from_csv(read_file(csv_path)));

  const auto th = thresholds_monotone(sweep);
  const auto bw = blackwell_monotone(sweep, cfg.sweep_probes);
  const auto su = surplus_monotone(sweep, cfg.sweep_probes);
  const auto dc = dispersion_chain(base, cfg.sweep_t);
  clock.lap("reports");

  ordered_json rep = header(cfg, "sweep");
  rep["max_t"] = t_max;
  rep["members"] = ordered_json::array();
  for (const auto& m : sweep.members) {
    ordered_json j;
    j["t"] = m.t;
    j["thresholds"] = to_json(m.menu.thresholds);
    j["revenue"] = m.menu.revenue;
    ordered_json probes = ordered_json::array();
    const auto f = rotation_density(base, m.t);
    for (double p : cfg.sweep_probes) {
      const auto c = contract_at(p, m.menu.thresholds, v, f);
      probes.push_back({{"mu", p},
                        {"orientation", to_string(c.orientation)},
                        {"noise", c.noise},
                        {"surplus", m.menu.surplus_at(p)}});
    }
    j["probes"] = probes;
    rep["members"].push_back(j);
  }
  rep["thresholds_monotone"] = to_json(th);
  rep["blackwell_monotone"] = to_json(bw);
  rep["surplus_monotone"] = to_json(su);
  rep["dispersion_chain"] = to_json(dc);
  const bool ok = th.pass && bw.pass && su.pass && dc.pass;
  rep["pass"] = ok;
  write_json(cfg, "sweep_report.json", rep);
  clock.write(cfg.output);

  for (const auto& m : sweep.members) {
    log << "t " << m.t << "  mu_minus " << format_number(m.menu.thresholds.mu_minus) << "  mu_plus "
        << format_number(m.menu.thresholds.mu_plus) << "  revenue " << format_number(m.menu.revenue) << "\n";
  }
  log << "thresholds " << (th.pass ? "pass" : "FAIL") << ", informativeness " << (bw.pass ? "pass" : "FAIL")
      << ", surplus " << (su.pass ? "pass" : "FAIL") << ", dispersion " << (dc.pass ? "pass" : "FAIL") << "\n";
  return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_flat(const RunConfig& cfg, std::ostream& log) {
  const auto v = make_value_function(cfg.value);
  const auto f = make_density(cfg.density);
  const auto flat = flat_price_optimum(v, f);
  ordered_json rep = header(cfg, "flat");
  rep["flat_price"] = to_json(flat);
  log << "flat price " << format_number(flat.price) << "  revenue " << format_number(flat.revenue) << "\n";
  if (v.kind() == ValueKind::smooth) {
    try {
      const auto menu = build_menu(v, f, menu_options(cfg));
      rep["menu_revenue"] = menu.revenue;
      rep["menu_minus_flat"] = menu.revenue - flat.revenue;
      log << "menu revenue " << format_number(menu.revenue) << "\n";
    } catch (const std::exception& e) {
      rep["menu_revenue"] = std::string("unavailable: ") + e.what();
    }
  } else {
    rep["menu_revenue"] = "unavailable: value function is an action table";
  }
  write_json(cfg, "flat.json", rep);
  return kExitOk;
}

int cmd_assumptions(const RunConfig& cfg, std::ostream& log) {
  const auto v = make_value_function(cfg.value);
  const auto f = make_density(cfg.density);
  if (v.kind() != ValueKind::smooth) {
    throw UnsupportedKind("assumption checks need a C2 value function; action tables are piecewise linear");
  }
  const double lambda = solve_lambda(v, f, menu_options(cfg));
  const auto t = menu_thresholds(lambda, v, f);
  auto reports = check_assumptions(v, f, t, cfg.assumption_grid);
  const bool ok = gating_pass(reports);

  ordered_json rep = header(cfg, "assumptions");
  rep["thresholds"] = to_json(t);
  rep["assumptions"] = reports_json(reports);

  OptimalMenu menu;
  try {
    MenuOptions opts = menu_options(cfg);
    opts.check_assumptions = false;
    menu = build_menu(v, f, opts);
    auto bound = check_exclusion_bound(v, f, lambda, lambda, menu.revenue);
    rep["exclusion_bound_diagnostic"] = to_json(bound);
  } catch (const std::exception& e) {
    rep["exclusion_bound_diagnostic"] = std::string("unavailable: ") + e.what();
  }

  const auto nus = interior_grid(256);
  ordered_json scan = ordered_json::array();
  for (double mu : interior_grid(32)) {
    auto s = to_json(h_scan(mu, lambda, v, f, nus, t.exclusion_lo, t.exclusion_hi));
    s["mu"] = mu;
    scan.push_back(s);
  }
  rep["h_scan"] = scan;

  const auto disp = is_more_dispersed(f, BeliefDensity::uniform());
  rep["dispersion_vs_uniform"] = {{"more_dispersed", disp.more_dispersed},
                                  {"mu_minus_g", disp.mu_minus_g},
                                  {"alternate_root", disp.alternate_root ? ordered_json(*disp.alternate_root)
                                                                         : ordered_json(nullptr)},
                                  {"notes", disp.notes}};
  rep["pass"] = ok;
  write_json(cfg, "assumptions.json", rep);

  for (const auto& r : reports) {
    log << (r.pass ? "pass " : "FAIL ") << r.condition << "  worst " << format_number(r.worst_violation) << "\n";
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    if (name == "solve") return cmd_solve(cfg, log);
    if (name == "verify") return cmd_verify(cfg, log);
    if (name == "oracle") return cmd_oracle(cfg, log);
    if (name == "sweep") return cmd_sweep(cfg, log);
    if (name == "flat") return cmd_flat(cfg, log);
    if (name == "assumptions") return cmd_assumptions(cfg, log);
    err << "error: unknown command '" << name << "'\n";
    return kExitInputError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const FileError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const UnsupportedKind& e) {
    err << "unsupported: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const AssumptionRefusal& e) {
    err << "refused: " << e.what() << " (pass --override-assumptions to solve anyway)\n";
    return kExitSolverFailure;
  } catch (const RootNotBracketed& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitSolverFailure;
  }
}

}  // namespace infomenu
