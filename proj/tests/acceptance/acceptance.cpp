// Acceptance checks. Prints one PASS/FAIL line per criterion; with a number
// argument only that criterion runs. Exit status is nonzero if any ran and
// failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "infomenu/commands.hpp"
#include "infomenu/comparative.hpp"
#include "infomenu/config.hpp"
#include "infomenu/menu_solver.hpp"
#include "infomenu/oracle.hpp"
#include "infomenu/reports.hpp"

using namespace infomenu;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& o, bool ok, const std::string& what) {
  o.pass = o.pass && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += (ok ? "" : "FAILED ") + what;
}

std::string num(double x, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// Example 1's printed linear condition solved for the posterior.
double printed_nu(double mu) { return (3.5 * mu - 2 * mu * mu - 1) / (2 * mu - 1); }

const double kExclusionHi = (4.5 + std::sqrt(4.25)) / 8.0;

DiscreteInstance criterion4_instance() {
  return make_instance(uniform_types(21, 0.05, 0.95), simple_catalog(0.1), ValueFunction::quadratic());
}

// ---------------------------------------------------------------------------

Outcome c1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto v = ValueFunction::quadratic();
  const auto f = BeliefDensity::uniform();
  const auto m = build_menu(v, f);
  const double elapsed = seconds_since(t0);
  const auto& t = m.thresholds;
  note(o, t.lambda == 0.5, "lambda " + num(t.lambda, 17));
  note(o, std::abs(t.mu_minus - 0.25) <= 1e-8 && std::abs(t.mu_plus - 0.75) <= 1e-8 && std::abs(t.mu0 - 0.5) <= 1e-8,
       "thresholds " + num(t.mu_minus, 12) + "/" + num(t.mu0, 12) + "/" + num(t.mu_plus, 12));
  double worst = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double mu = 0.75 + (kExclusionHi - 0.75) * i / 21.0;
    worst = std::max(worst, std::abs(solve_foc_posterior(mu, t, v, f).posterior - printed_nu(mu)));
  }
  note(o, worst <= 1e-8, "20 probes max |nu - printed| " + num(worst, 3));
  note(o, std::abs(t.exclusion_hi - 0.820194) <= 1e-6, "exclusion " + num(t.exclusion_hi, 10));
  note(o, elapsed < 5.0, "runtime " + num(elapsed, 3) + " s");
  return o;
}

Outcome c2() {
  Outcome o;
  const auto v = ValueFunction::quadratic();
  const auto f = BeliefDensity::uniform();
  const auto fp = flat_price_optimum(v, f);
  // Gain from full revelation is mu(1 - mu); price p sells to a band of width
  // sqrt(1 - 4p), so revenue p sqrt(1 - 4p) peaks at p = 1/6.
  const double p_star = 1.0 / 6.0, r_star = 1.0 / (6.0 * std::sqrt(3.0));
  double grid_best = 0.0, grid_p = 0.0;
  for (int k = 1; k < 25000; ++k) {
    const double p = 0.25 * k / 25000.0;
    const double r = p * std::sqrt(1.0 - 4.0 * p);
    if (r > grid_best) {
      grid_best = r;
      grid_p = p;
    }
  }
  note(o, std::abs(grid_p - p_star) < 1e-4 && std::abs(grid_best - r_star) < 1e-8, "grid search agrees");
  note(o, std::abs(fp.price - p_star) <= 1e-4, "p* " + num(fp.price, 10));
  note(o, std::abs(fp.revenue - r_star) <= 1e-4, "flat revenue " + num(fp.revenue, 10));
  const auto m = build_menu(v, f);
  note(o, m.revenue >= fp.revenue - 1e-9, "menu revenue " + num(m.revenue, 10));
  return o;
}

Outcome c3() {
  Outcome o;
  const auto v = ValueFunction::quadratic();
  MenuOptions opts;
  opts.grid = 2001;
  const auto m = build_menu(v, BeliefDensity::uniform(), opts);
  const auto r = verify_ic_ir(m, v, 1e-7);
  note(o, r.pass && r.worst_violation < 1e-7,
       std::to_string(r.types_checked) + " types, worst violation " + num(r.worst_violation, 3));
  return o;
}

Outcome c4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto v = ValueFunction::quadratic();
  const auto f = BeliefDensity::uniform();
  const auto inst = criterion4_instance();
  const auto mech = brute_force_optimal(inst);
  const auto menu = build_menu(v, f);
  const auto r = closed_form_restriction(menu, inst, v, f, 1e-9);
  const double elapsed = seconds_since(t0);
  const double rel = std::abs(mech.revenue - r.revenue) / r.revenue;
  note(o, rel <= 0.03,
       "oracle " + num(mech.revenue, 10) + " (" + mech.mode + ") vs closed form " + num(r.revenue, 10) +
           ", relative gap " + num(rel, 4));
  note(o, r.feasibility.pass, "closed-form restriction IC/IR worst " + num(r.feasibility.worst_violation, 3));
  note(o, verify_ic_ir(inst, mech, 1e-9).pass, "oracle mechanism IC/IR");
  note(o, elapsed < 60.0, "runtime " + num(elapsed, 3) + " s");
  return o;
}

Outcome c5() {
  Outcome o;
  const auto v = ValueFunction::quadratic();
  const auto base = make_instance(uniform_types(7, 0.125, 0.875), simple_catalog(0.125), v);
  const auto rep = three_signal_no_improvement(base, 0.125, 1e-6);
  note(o, rep.pass && rep.gain < 1e-6,
       "7 types, catalog " + std::to_string(rep.base_catalog) + " -> " + std::to_string(rep.extended_catalog) +
           ", gain " + num(rep.gain, 3));
  note(o, rep.base_exhaustive && rep.extended_exhaustive, "both solves exhaustive");
  const auto inst = criterion4_instance();
  const auto mech = brute_force_optimal(inst);
  const auto pat = revealed_state_pattern(inst, mech, 0.5);
  note(o, pat.applicable && pat.pass, "revealed-state pattern on the criterion-4 optimum");
  return o;
}

Outcome c6() {
  Outcome o;
  const auto v = ValueFunction::from_actions(four_action_table());
  const auto f = BeliefDensity::uniform();
  const auto flat = flat_price_optimum(v, f);
  // Uniform beliefs as 40 equally weighted cell midpoints.
  std::vector<DiscreteType> types;
  for (int i = 0; i < 40; ++i) types.push_back({(i + 0.5) / 40.0, 1.0 / 40.0});
  const auto flat_only = brute_force_optimal(make_instance(types, {}, v));
  double best = 0.0, best_q = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double q = k / 100.0;
    const auto m = brute_force_optimal(make_instance(types, {SimpleExperiment::reveal_l(q).to_general()}, v));
    if (m.revenue > best + 1e-12) {
      best = m.revenue;
      best_q = q;
    }
  }
  const double bench = std::max(flat.revenue, flat_only.revenue);
  note(o, best > bench + 1e-6,
       "full + reveal-l(" + num(best_q, 2) + ") earns " + num(best, 10) + " vs flat " + num(flat.revenue, 10) +
           " (continuum) and " + num(flat_only.revenue, 10) + " (same types)");
  return o;
}

Outcome c7() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto v = ValueFunction::quadratic();
  const auto u = BeliefDensity::uniform();
  const double ts[] = {0.0, 0.1, 0.2, 0.3, 0.4};
  const double probes[] = {0.1, 0.15, 0.2, 0.8, 0.85, 0.9};
  const auto sweep = solve_family(u, ts, v);
  for (const auto& m : sweep.members) note(o, m.ok, "t " + num(m.t, 2) + " solved");
  note(o, thresholds_monotone(sweep).pass, "mu_minus nonincreasing, mu_plus nondecreasing");
  // Noise per probe on a common scale: null 0, full 1.
  double worst_noise = 0.0;
  for (double p : probes) {
    for (std::size_t i = 1; i < sweep.members.size(); ++i) {
      auto noise = [&](const FamilyMember& m) {
        return contract_at(p, m.menu.thresholds, v, rotation_density(u, m.t)).normalized().noise;
      };
      worst_noise = std::max(worst_noise, noise(sweep.members[i - 1]) - noise(sweep.members[i]));
    }
  }
  note(o, worst_noise <= 1e-8 && blackwell_monotone(sweep, probes).pass,
       "per-probe noise nondecreasing (worst drop " + num(worst_noise, 3) + ")");
  note(o, surplus_monotone(sweep, probes).pass, "per-probe surplus nondecreasing");
  note(o, dispersion_chain(u, ts).pass, "dispersion order between consecutive members");
  const double elapsed = seconds_since(t0);
  note(o, elapsed < 30.0, "runtime " + num(elapsed, 3) + " s");
  return o;
}

Outcome c8() {
  Outcome o;
  const auto q = ValueFunction::quadratic();
  const auto cubic = ValueFunction::polynomial({0.0, -0.3, 0.2, 0.5});
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double mart = 0.0, branch = 0.0, fd_rel = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const double mu = 0.01 + 0.98 * unit(rng), n = unit(rng);
    for (auto e : {SimpleExperiment::reveal_h(n), SimpleExperiment::reveal_l(n), SimpleExperiment::full()}) {
      const auto g = e.to_general();
      double mean = 0.0, value = 0.0;
      for (std::size_t s = 0; s < g.size(); ++s) {
        const double p = g.signals()[s].given_h * mu + g.signals()[s].given_l * (1.0 - mu);
        if (p <= 0.0) continue;
        const double post = g.signals()[s].given_h * mu / p;
        mean += p * post;
        value += p * cubic(post);
      }
      mart = std::max(mart, std::abs(mean - mu));
      branch = std::max(branch, std::abs(delta_v(mu, e, cubic) - (value - cubic(mu))));
      const double h = 1e-5;
      const double fd = (delta_v(mu + h, e, cubic) - delta_v(mu - h, e, cubic)) / (2 * h);
      fd_rel = std::max(fd_rel, std::abs(delta_v_mu(mu, e, cubic) - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  note(o, mart < 1e-12, "martingale " + num(mart, 2));
  note(o, branch < 1e-12, "branch vs definition " + num(branch, 2));
  note(o, fd_rel < 1e-6, "dDeltaV/dmu vs differences " + num(fd_rel, 2));

  const auto u = BeliefDensity::uniform();
  const auto m = build_menu(q, u);
  double foc = 0.0;
  for (const auto& r : m.records) {
    const auto o2 = r.contract.orientation;
    if (o2 == Orientation::reveal_l) foc = std::max(foc, std::abs(foc_residual(Side::high, r.mu, r.posterior, 0.5, q, u)));
    if (o2 == Orientation::reveal_h) foc = std::max(foc, std::abs(foc_residual(Side::low, r.mu, r.posterior, 0.5, q, u)));
  }
  note(o, foc < 1e-8, "FOC residuals " + num(foc, 2));

  std::vector<GridPoint> pts;
  const auto& t = m.thresholds;
  for (double mu : interior_grid(64, t.mu0, 1.0)) {
    pts.push_back({mu, t.mu_plus});
    for (double nu : interior_grid(63, t.mu_plus, 1.0)) pts.push_back({mu, nu});
  }
  for (double mu : interior_grid(64, 0.0, t.mu0)) {
    pts.push_back({mu, t.mu_minus});
    for (double nu : interior_grid(63, 0.0, t.mu_minus)) pts.push_back({mu, nu});
  }
  const auto scd = scd_signs(q, t.mu0, pts);
  note(o, scd.pass, "SCD signs on " + std::to_string(scd.points_checked) + " points");

  double env = 0.0;
  for (std::size_t i = 0; i < m.records.size(); i += 5) {
    double best = 0.0;
    for (const auto& r : m.records) best = std::max(best, delta_v(m.records[i].mu, r.contract, q) - r.price);
    env = std::max(env, std::abs(best - m.records[i].surplus));
  }
  note(o, env < 1e-4, "envelope identity " + num(env, 2));

  MenuOptions fine;
  fine.grid = 2001;
  const double rel = std::abs(build_menu(q, u, fine).revenue - m.revenue) / m.revenue;
  note(o, rel < 1e-6, "grid refinement " + num(rel, 2));

  namespace fs = std::filesystem;
  const auto root = fs::temp_directory_path() / "infomenu_acceptance";
  fs::remove_all(root);
  bool same = true;
  std::string first[3];
  for (int k = 0; k < 2; ++k) {
    RunConfig cfg = parse_config_text("value_function:\n  kind: quadratic\n");
    cfg.output = (root / "run").string();
    std::ostringstream log, err;
    same = same && run_command("solve", cfg, log, err) == kExitOk;
    const char* files[] = {"menu.csv", "thresholds.json", "report.json"};
    for (int j = 0; j < 3; ++j) {
      const auto text = read_file(cfg.output + "/" + files[j]);
      if (k == 0) first[j] = text;
      same = same && text == first[j];
    }
    fs::rename(cfg.output, root / ("run" + std::to_string(k)));
  }
  note(o, same, "byte-identical rerun");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Example 1 golden", c1},          {"flat-price benchmark", c2},   {"global IC/IR", c3},
      {"oracle equivalence", c4},        {"three-signal and pattern", c5}, {"rich-menu dominance", c6},
      {"comparative statics", c7},       {"property suites", c8}};
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && only != static_cast<int>(i + 1)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all_pass = all_pass && o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
  }
  return all_pass ? 0 : 1;
}
