#include "infomenu/menu_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "infomenu/errors.hpp"
#include "infomenu/numerics.hpp"

namespace infomenu {

namespace {

constexpr double kRootTol = 1e-15;
constexpr double kThresholdTol = 1e-14;
constexpr double kLambdaTol = 1e-14;
// Beliefs this close to 0 or 1 take the contract of the adjacent interior
// limit; at the endpoints themselves every experiment is worthless.
constexpr double kEdge = 1e-12;

double coefficient_denominator(const BeliefDensity& f, double lambda, double mu) {
  return lambda + f.cdf(mu) - 1.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Thresholds

double lower_threshold_residual(const BeliefDensity& f, double lambda, double mu) {
  return f.pdf(mu) * mu + coefficient_denominator(f, lambda, mu);
}

double upper_threshold_residual(const BeliefDensity& f, double lambda, double mu) {
  return f.pdf(mu) * (1.0 - mu) - coefficient_denominator(f, lambda, mu);
}

ThresholdSet solve_thresholds(const BeliefDensity& f, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0,1)");
  ThresholdSet t;
  t.lambda = lambda;
  t.mu0 = f.quantile(1.0 - lambda);
  t.mu_minus = numerics::bisect([&](double m) { return lower_threshold_residual(f, lambda, m); }, 0.0, t.mu0,
                                kThresholdTol, "f(mu)mu + (lambda + F(mu) - 1) = 0")
                   .x;
  t.mu_plus = numerics::bisect([&](double m) { return upper_threshold_residual(f, lambda, m); }, t.mu0, 1.0,
                               kThresholdTol, "f(mu)(1 - mu) - (lambda + F(mu) - 1) = 0")
                  .x;
  t.exclusion_lo = 0.0;
  t.exclusion_hi = 1.0;
  return t;
}

// ---------------------------------------------------------------------------
// First-order conditions

double foc_residual(Side side, double mu, double nu, double lambda, const ValueFunction& v,
                    const BeliefDensity& f) {
  const double c = coefficient_denominator(f, lambda, mu);
  const double fm = f.pdf(mu);
  if (side == Side::high) {
    const double a = 1.0 - fm * (1.0 - mu) / c;
    return a * (v(nu) - v(0.0) - nu * v.derivative(nu)) + v.second_derivative(nu) * nu * nu * (1.0 - nu) / mu;
  }
  const double b = 1.0 + fm * mu / c;
  return b * (v(nu) - v(1.0) + (1.0 - nu) * v.derivative(nu)) +
         v.second_derivative(nu) * nu * (1.0 - nu) * (1.0 - nu) / (1.0 - mu);
}

namespace {

// Root of the branch FOC between mu and the conclusive end of its side. The
// residual is negative at the conclusive end for convex V; a non-positive
// residual at nu = mu means no interior root and the type is excluded.
FocSolution solve_branch(Side side, double mu, double lambda, const ValueFunction& v, const BeliefDensity& f) {
  FocSolution s;
  const double end = side == Side::high ? 1.0 : 0.0;
  auto r = [&](double nu) { return foc_residual(side, mu, nu, lambda, v, f); };
  const double at_mu = r(mu);
  if (!(at_mu > 0.0)) {
    s.posterior = mu;
    s.clamped = true;
    return s;
  }
  const double at_end = r(end);
  if (at_end >= 0.0) {
    s.posterior = end;
    s.full = true;
    s.residual = at_end;
    return s;
  }
  const double lo = side == Side::high ? mu : 0.0;
  const double hi = side == Side::high ? 1.0 : mu;
  const auto root = numerics::bisect(r, lo, hi, kRootTol,
                                     side == Side::high ? "high-side first-order condition"
                                                        : "low-side first-order condition");
  s.posterior = root.x;
  s.residual = root.residual;
  return s;
}

}  // namespace

FocSolution solve_foc_posterior(double mu, const ThresholdSet& t, const ValueFunction& v,
                                const BeliefDensity& f) {
  require_belief(mu, "prior");
  if (v.kind() != ValueKind::smooth) throw UnsupportedKind("first-order conditions need a C2 value function");
  if (mu >= t.mu_minus && mu <= t.mu_plus) {
    FocSolution s;
    s.full = true;
    s.posterior = mu >= t.mu0 ? 1.0 : 0.0;
    return s;
  }
  const double m = std::clamp(mu, kEdge, 1.0 - kEdge);
  FocSolution s = solve_branch(mu > t.mu_plus ? Side::high : Side::low, m, t.lambda, v, f);
  if (s.clamped) s.posterior = mu;
  return s;
}

FocSolution solve_foc_posterior(double mu, double lambda, const ValueFunction& v, const BeliefDensity& f) {
  return solve_foc_posterior(mu, solve_thresholds(f, lambda), v, f);
}

double noise_from_posterior(double mu, double nu, Orientation orientation) {
  require_belief(mu, "prior");
  require_belief(nu, "posterior");
  switch (orientation) {
    case Orientation::reveal_l:
      if (nu < mu) throw DomainError("reveal-l posterior must lie in [mu, 1]");
      if (nu == mu) return 0.0;
      if (nu == 1.0) return 1.0;
      return 1.0 - mu * (1.0 - nu) / (nu * (1.0 - mu));
    case Orientation::reveal_h:
      if (nu > mu) throw DomainError("reveal-h posterior must lie in [0, mu]");
      if (nu == mu) return 0.0;
      if (nu == 0.0) return 1.0;
      return 1.0 - nu * (1.0 - mu) / (mu * (1.0 - nu));
    case Orientation::full: return 1.0;
    case Orientation::null: return 0.0;
  }
  return 0.0;
}

double exclusion_point(double lambda, const ValueFunction& v, const BeliefDensity& f, Side side) {
  if (v.kind() != ValueKind::smooth) throw UnsupportedKind("exclusion point needs a C2 value function");
  const ThresholdSet t = solve_thresholds(f, lambda);
  auto served = [&](double mu) { return foc_residual(side, mu, mu, lambda, v, f) > 0.0; };
  if (side == Side::high) {
    if (served(1.0 - 1e-10)) return 1.0;
    return numerics::bisect_predicate(served, t.mu_plus, 1.0, 1e-14);
  }
  if (served(1e-10)) return 0.0;
  // Mirror so the predicate holds at the lower end of the search interval.
  return 1.0 - numerics::bisect_predicate([&](double x) { return served(1.0 - x); }, 1.0 - t.mu_minus, 1.0,
                                          1e-14);
}

ThresholdSet menu_thresholds(double lambda, const ValueFunction& v, const BeliefDensity& f) {
  ThresholdSet t = solve_thresholds(f, lambda);
  t.exclusion_hi = exclusion_point(lambda, v, f, Side::high);
  t.exclusion_lo = exclusion_point(lambda, v, f, Side::low);
  return t;
}

SimpleExperiment contract_at(double mu, const ThresholdSet& t, const ValueFunction& v, const BeliefDensity& f) {
  require_belief(mu, "prior");
  if (mu >= t.mu_minus && mu <= t.mu_plus) return SimpleExperiment::full();
  if (mu < t.exclusion_lo || mu > t.exclusion_hi) return SimpleExperiment::null();
  const double m = std::clamp(mu, kEdge, 1.0 - kEdge);
  const auto sol = solve_foc_posterior(m, t, v, f);
  if (sol.clamped) return SimpleExperiment::null();
  const Orientation o = mu > t.mu_plus ? Orientation::reveal_l : Orientation::reveal_h;
  return SimpleExperiment{o, noise_from_posterior(m, sol.posterior, o)}.normalized();
}

// ---------------------------------------------------------------------------
// Contract curve, prices, revenue

std::vector<MenuRecord> contract_curve(const ThresholdSet& t, const ValueFunction& v, const BeliefDensity& f,
                                       std::size_t grid) {
  if (grid < 3) throw DomainError("menu grid needs at least 3 points");
  std::vector<double> mus(grid);
  for (std::size_t i = 0; i < grid; ++i) mus[i] = static_cast<double>(i) / static_cast<double>(grid - 1);
  for (double x : {t.mu0, t.mu_minus, t.mu_plus, t.exclusion_lo, t.exclusion_hi}) mus.push_back(x);
  std::sort(mus.begin(), mus.end());
  mus.erase(std::unique(mus.begin(), mus.end()), mus.end());

  std::vector<MenuRecord> out;
  out.reserve(mus.size());
  for (double mu : mus) {
    MenuRecord r;
    r.mu = mu;
    const double m = std::clamp(mu, kEdge, 1.0 - kEdge);
    if (mu >= t.mu_minus && mu <= t.mu_plus) {
      r.contract = SimpleExperiment::full();
      r.posterior = mu >= t.mu0 ? 1.0 : 0.0;
    } else if (mu < t.exclusion_lo || mu > t.exclusion_hi) {
      r.contract = SimpleExperiment::null();
      r.posterior = mu;
    } else {
      const auto sol = solve_foc_posterior(m, t, v, f);
      r.clamped = sol.clamped;
      r.foc_residual = sol.residual;
      if (sol.clamped) {
        r.contract = SimpleExperiment::null();
        r.posterior = mu;
      } else {
        const Orientation o = mu > t.mu_plus ? Orientation::reveal_l : Orientation::reveal_h;
        r.contract = SimpleExperiment{o, noise_from_posterior(m, sol.posterior, o)}.normalized();
        r.posterior = sol.posterior;
      }
    }
    r.gross_utility = experiment_value(r.contract, mu, v);
    out.push_back(r);
  }
  return out;
}

namespace {

// dDeltaV/dmu along the curve. Endpoint records use the interior limit of
// their contract.
std::vector<double> surplus_slopes(const std::vector<MenuRecord>& records, const ValueFunction& v) {
  std::vector<double> g(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    g[i] = delta_v_mu(std::clamp(records[i].mu, kEdge, 1.0 - kEdge), records[i].contract, v);
  }
  return g;
}

}  // namespace

void price_schedule(std::vector<MenuRecord>& records, double mu0, const ValueFunction& v) {
  const std::size_t n = records.size();
  if (n == 0) return;
  const auto g = surplus_slopes(records, v);
  std::vector<double> left(n, 0.0), right(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    left[i] = left[i - 1] + 0.5 * (records[i].mu - records[i - 1].mu) * (g[i] + g[i - 1]);
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    right[i] = right[i + 1] - 0.5 * (records[i + 1].mu - records[i].mu) * (g[i] + g[i + 1]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    MenuRecord& r = records[i];
    if (r.contract.orientation == Orientation::null) {
      r.surplus = 0.0;
      r.price = 0.0;
      continue;
    }
    r.surplus = r.mu <= mu0 ? left[i] : right[i];
    r.price = delta_v(r.mu, r.contract, v) - r.surplus;
  }
}

double revenue(std::span<const MenuRecord> records, const BeliefDensity& f) {
  double sum = 0.0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    sum += 0.5 * (b.mu - a.mu) * (a.price * f.pdf(a.mu) + b.price * f.pdf(b.mu));
  }
  return sum;
}

double revenue(const OptimalMenu& menu, const BeliefDensity& f) { return revenue(menu.records, f); }

namespace {

double interpolate(const std::vector<MenuRecord>& recs, double mu, double MenuRecord::*field) {
  if (recs.empty()) return 0.0;
  if (mu <= recs.front().mu) return recs.front().*field;
  if (mu >= recs.back().mu) return recs.back().*field;
  const auto it = std::lower_bound(recs.begin(), recs.end(), mu,
                                   [](const MenuRecord& r, double x) { return r.mu < x; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  if (b.mu == a.mu) return b.*field;
  const double w = (mu - a.mu) / (b.mu - a.mu);
  return (1.0 - w) * (a.*field) + w * (b.*field);
}

}  // namespace

double OptimalMenu::surplus_at(double mu) const { return interpolate(records, mu, &MenuRecord::surplus); }
double OptimalMenu::price_at(double mu) const { return interpolate(records, mu, &MenuRecord::price); }

// ---------------------------------------------------------------------------
// Multiplier

double lambda_residual(double lambda, const ValueFunction& v, const BeliefDensity& f, std::size_t grid) {
  const ThresholdSet t = menu_thresholds(lambda, v, f);
  const auto recs = contract_curve(t, v, f, grid);
  const auto g = surplus_slopes(recs, v);
  double sum = 0.0;
  for (std::size_t i = 1; i < recs.size(); ++i) sum += 0.5 * (recs[i].mu - recs[i - 1].mu) * (g[i] + g[i - 1]);
  return sum;
}

double solve_lambda(const ValueFunction& v, const BeliefDensity& f, const MenuOptions& opts, LambdaTrace* trace) {
  if (v.symmetric() && f.symmetric()) return 0.5;
  auto r = [&](double lambda) {
    const double res = lambda_residual(lambda, v, f, opts.grid);
    if (trace) {
      trace->lambdas.push_back(lambda);
      trace->residuals.push_back(res);
    }
    return res;
  };
  try {
    return numerics::bisect(r, opts.lambda_lo, opts.lambda_hi, kLambdaTol,
                            "integral of dDeltaV/dmu over [0,1] = 0 (multiplier)")
        .x;
  } catch (const RootNotBracketed& e) {
    std::ostringstream os;
    os << e.what() << "; trace:";
    if (trace) {
      for (std::size_t i = 0; i < trace->lambdas.size(); ++i) {
        os << " (" << trace->lambdas[i] << ", " << trace->residuals[i] << ")";
      }
    }
    throw RootNotBracketed(e.equation(), os.str());
  }
}

// ---------------------------------------------------------------------------
// Flat price

double flat_revenue(const ValueFunction& v, const BeliefDensity& f, double price,
                    std::vector<std::pair<double, double>>* served) {
  // Gain from full revelation is concave in mu, so the served set is an
  // interval around its maximizer.
  auto gain = [&](double mu) { return delta_v(mu, SimpleExperiment::full(), v); };
  const double peak = numerics::golden_section_max(gain, 0.0, 1.0, 1e-13);
  if (served) served->clear();
  if (!(price > 0.0)) {
    if (served) served->push_back({0.0, 1.0});
    return 0.0;
  }
  if (gain(peak) < price) return 0.0;
  auto above = [&](double mu) { return gain(mu) >= price; };
  const double b = numerics::bisect_predicate(above, peak, 1.0, 1e-14);
  const double a = 1.0 - numerics::bisect_predicate([&](double x) { return above(1.0 - x); }, 1.0 - peak, 1.0,
                                                    1e-14);
  if (served) served->push_back({a, b});
  return price * (f.cdf(b) - f.cdf(a));
}

FlatPrice flat_price_optimum(const ValueFunction& v, const BeliefDensity& f) {
  FlatPrice out;
  auto gain = [&](double mu) { return delta_v(mu, SimpleExperiment::full(), v); };
  const double top = gain(numerics::golden_section_max(gain, 0.0, 1.0, 1e-13));
  // Rounding noise of a linear V is not a sellable gain.
  if (!(top > 1e-14)) {
    out.served.push_back({0.0, 1.0});
    return out;
  }
  constexpr std::size_t kScan = 1024;
  std::size_t best = 0;
  double best_rev = -1.0;
  for (std::size_t i = 0; i <= kScan; ++i) {
    const double p = top * static_cast<double>(i) / kScan;
    const double r = flat_revenue(v, f, p);
    if (r > best_rev) {
      best_rev = r;
      best = i;
    }
  }
  const double lo = top * static_cast<double>(best == 0 ? 0 : best - 1) / kScan;
  const double hi = top * static_cast<double>(std::min(best + 1, kScan)) / kScan;
  const double p = numerics::golden_section_max([&](double x) { return flat_revenue(v, f, x); }, lo, hi, 1e-13);
  out.price = p;
  out.revenue = flat_revenue(v, f, p, &out.served);
  if (out.revenue < best_rev) {
    out.price = top * static_cast<double>(best) / kScan;
    out.revenue = flat_revenue(v, f, out.price, &out.served);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orchestration

AssumptionRefusal::AssumptionRefusal(std::vector<AssumptionReport> reports)
    : std::runtime_error([&] {
        std::string msg = "assumption check failed:";
        for (const auto& r : reports) {
          if (!r.pass) msg += " " + r.condition;
        }
        return msg;
      }()),
      reports_(std::move(reports)) {}

std::vector<AssumptionReport> check_assumptions(const ValueFunction& v, const BeliefDensity& f, const ThresholdSet& t,
                                                std::size_t n) {
  const bool symmetric = v.symmetric() && f.symmetric();
  std::vector<AssumptionReport> out;
  const auto mu_grid = interior_grid(n);
  const double lambdas[] = {t.lambda};
  out.push_back(check_mlr(f, lambdas, mu_grid));

  SupermodParams p;
  p.mu_lo = 0.5 * t.mu_minus;
  p.mu_hi = 0.5 * (1.0 + t.mu_plus);
  p.lambda_lo = p.lambda_hi = t.lambda;
  out.push_back(check_supermod_virtual(v, f, p, mu_grid, !symmetric));

  // Cross-derivative signs where menu posteriors live: reveal-l posteriors
  // lie in [mu_plus, 1), reveal-h posteriors in (0, mu_minus].
  std::vector<GridPoint> pts;
  const auto hi_mu = interior_grid(64, t.mu0, 1.0);
  const auto hi_nu = interior_grid(63, t.mu_plus, 1.0);
  const auto lo_mu = interior_grid(64, 0.0, t.mu0);
  const auto lo_nu = interior_grid(63, 0.0, t.mu_minus);
  for (double m : hi_mu) {
    pts.push_back({m, t.mu_plus});
    for (double x : hi_nu) pts.push_back({m, x});
  }
  for (double m : lo_mu) {
    for (double x : lo_nu) pts.push_back({m, x});
    pts.push_back({m, t.mu_minus});
  }
  out.push_back(scd_signs(v, t.mu0, pts));
  return out;
}

OptimalMenu build_menu(const ValueFunction& v, const BeliefDensity& f, const MenuOptions& opts) {
  if (v.kind() != ValueKind::smooth) {
    throw UnsupportedKind("the closed-form menu needs a C2 value function; action tables are piecewise linear");
  }
  OptimalMenu menu;
  const double lambda = solve_lambda(v, f, opts);
  menu.thresholds = menu_thresholds(lambda, v, f);

  if (opts.check_assumptions) {
    menu.assumptions = check_assumptions(v, f, menu.thresholds, opts.assumption_grid);
    const bool ok = std::all_of(menu.assumptions.begin(), menu.assumptions.end(),
                                [](const AssumptionReport& r) { return r.pass; });
    if (!ok) {
      if (!opts.override_assumptions) throw AssumptionRefusal(menu.assumptions);
      for (const auto& r : menu.assumptions) {
        if (!r.pass) menu.warnings.push_back("assumption overridden: " + r.condition);
      }
    }
  }

  menu.records = contract_curve(menu.thresholds, v, f, opts.grid);
  price_schedule(menu.records, menu.thresholds.mu0, v);
  menu.revenue = revenue(menu.records, f);
  for (const auto& r : menu.records) {
    if (r.clamped) {
      menu.warnings.push_back("type " + std::to_string(r.mu) + " inside the served band has no interior FOC root");
      break;
    }
  }

  if (opts.check_assumptions) {
    // Reported but not gating: symmetric problems do not need it.
    auto bound = check_exclusion_bound(v, f, lambda, lambda, menu.revenue);
    bound.condition = "exclusion_bound (diagnostic)";
    if (!bound.pass) menu.warnings.push_back("exclusion bound not met (diagnostic only)");
    menu.assumptions.push_back(std::move(bound));
  }
  return menu;
}

}  // namespace infomenu
