#include "infomenu/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infomenu/errors.hpp"
#include "infomenu/menu_solver.hpp"

namespace infomenu {

namespace {

// Violation of "x > 0" with a round-off margin relative to `scale`.
double strict_positive_violation(double x, double scale) {
  return std::max(0.0, 1e-14 * std::max(1.0, scale) - x);
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

double denominator(const BeliefDensity& f, double lambda, double mu) { return lambda + f.cdf(mu) - 1.0; }

}  // namespace

void AssumptionReport::record(double violation, std::string expr, std::optional<double> mu_,
                              std::optional<double> mu_next_, std::optional<double> nu_,
                              std::optional<double> nu_next_, std::optional<double> lambda_) {
  ++points_checked;
  if (points_checked > 1 && violation <= worst_violation) return;
  worst_violation = std::max(worst_violation, violation);
  expression = std::move(expr);
  mu = mu_;
  mu_next = mu_next_;
  nu = nu_;
  nu_next = nu_next_;
  lambda = lambda_;
}

void AssumptionReport::finish() { pass = !inconclusive && worst_violation <= tolerance; }

std::vector<double> interior_grid(std::size_t n, double lo, double hi) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * (static_cast<double>(i) + 1.0) / (static_cast<double>(n) + 1.0);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Monotone likelihood ratio

double mlr_ratio_high(const BeliefDensity& f, double lambda, double mu) {
  return f.pdf(mu) * (1.0 - mu) / denominator(f, lambda, mu);
}

double mlr_ratio_low(const BeliefDensity& f, double lambda, double mu) {
  return f.pdf(mu) * mu / denominator(f, lambda, mu);
}

AssumptionReport check_mlr(const BeliefDensity& f, std::span<const double> lambda_grid,
                           std::span<const double> mu_grid) {
  AssumptionReport rep;
  rep.condition = "mlr";
  rep.tolerance = kMonotoneTol;
  std::vector<double> grid(mu_grid.begin(), mu_grid.end());
  std::sort(grid.begin(), grid.end());
  for (double lambda : lambda_grid) {
    const double mu0 = f.quantile(1.0 - lambda);
    std::vector<double> low, high;
    for (double m : grid) {
      if (std::abs(m - mu0) <= kGuardBand) {
        ++rep.points_guarded;
      } else if (m < mu0) {
        low.push_back(m);
      } else {
        high.push_back(m);
      }
    }
    for (std::size_t i = 1; i < high.size(); ++i) {
      const double diff = mlr_ratio_high(f, lambda, high[i]) - mlr_ratio_high(f, lambda, high[i - 1]);
      rep.record(std::max(0.0, diff), "f(mu)(1-mu)/(lambda+F(mu)-1) at mu_next minus at mu", high[i - 1],
                 high[i], std::nullopt, std::nullopt, lambda);
    }
    for (std::size_t i = 1; i < low.size(); ++i) {
      const double diff = mlr_ratio_low(f, lambda, low[i]) - mlr_ratio_low(f, lambda, low[i - 1]);
      rep.record(std::max(0.0, diff), "f(mu)mu/(lambda+F(mu)-1) at mu_next minus at mu", low[i - 1], low[i],
                 std::nullopt, std::nullopt, lambda);
    }
  }
  if (rep.points_guarded > 0) {
    rep.notes.push_back(std::to_string(rep.points_guarded) + " grid points skipped within " +
                        num(kGuardBand) + " of F^{-1}(1-lambda)");
  }
  rep.finish();
  return rep;
}

// ---------------------------------------------------------------------------
// Supermodularity and virtual value

double supermod_increasing(const ValueFunction& v, const SupermodParams& p, double nu) {
  return v(nu) + v.derivative(nu) * (1.0 - nu) +
         v.second_derivative(nu) * nu * (1.0 - nu) * (1.0 - nu) / (1.0 - p.mu_hi);
}

double supermod_decreasing(const ValueFunction& v, const SupermodParams& p, double nu) {
  return v(nu) - v.derivative(nu) * nu + v.second_derivative(nu) * nu * nu * (1.0 - nu) / p.mu_lo;
}

namespace {
double virtual_coef_low(const BeliefDensity& f, const SupermodParams& p) {
  return 1.0 + f.pdf(p.mu_lo) * p.mu_lo / denominator(f, p.lambda_hi, p.mu_lo);
}
double virtual_coef_high(const BeliefDensity& f, const SupermodParams& p) {
  return 1.0 - f.pdf(p.mu_hi) * (1.0 - p.mu_hi) / denominator(f, p.lambda_lo, p.mu_hi);
}
}  // namespace

double virtual_increasing(const ValueFunction& v, const BeliefDensity& f, const SupermodParams& p, double nu) {
  return virtual_coef_low(f, p) * (v(nu) + v.derivative(nu) * (1.0 - nu)) +
         v.second_derivative(nu) * nu * (1.0 - nu) * (1.0 - nu) / (1.0 - p.mu_lo);
}

double virtual_decreasing(const ValueFunction& v, const BeliefDensity& f, const SupermodParams& p, double nu) {
  return virtual_coef_high(f, p) * (v(nu) - v.derivative(nu) * nu) +
         v.second_derivative(nu) * nu * nu * (1.0 - nu) / p.mu_hi;
}

AssumptionReport check_supermod_virtual(const ValueFunction& v, const BeliefDensity& f,
                                        const SupermodParams& p, std::span<const double> nu_grid,
                                        bool include_virtual) {
  if (v.kind() != ValueKind::smooth) {
    throw UnsupportedKind("supermodularity conditions need a C2 value function");
  }
  if (!(0.0 < p.mu_lo && p.mu_lo < p.mu_hi && p.mu_hi < 1.0)) {
    throw DomainError("supermodularity check needs 0 < mu_lo < mu_hi < 1");
  }
  if (!(0.0 < p.lambda_lo && p.lambda_lo <= p.lambda_hi && p.lambda_hi < 1.0)) {
    throw DomainError("supermodularity check needs 0 < lambda_lo <= lambda_hi < 1");
  }
  AssumptionReport rep;
  rep.condition = include_virtual ? "supermodularity+virtual_value" : "supermodularity";
  rep.tolerance = 0.0;
  std::vector<double> grid(nu_grid.begin(), nu_grid.end());
  std::sort(grid.begin(), grid.end());
  std::vector<double> low, high;
  for (double n : grid) {
    if (n <= p.mu_lo) low.push_back(n);
    if (n >= p.mu_hi) high.push_back(n);
  }

  auto scan = [&](const std::vector<double>& pts, auto&& expr, bool increasing, const char* name) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double a = expr(pts[i - 1]), b = expr(pts[i]);
      const double step = increasing ? b - a : a - b;
      const double scale = std::max(std::abs(a), std::abs(b));
      rep.record(strict_positive_violation(step, scale), name, std::nullopt, std::nullopt, pts[i - 1], pts[i],
                 std::nullopt);
    }
  };
  scan(low, [&](double n) { return supermod_increasing(v, p, n); }, true,
       "V+V'(1-nu)+V''nu(1-nu)^2/(1-mu_hi) strictly increasing");
  scan(high, [&](double n) { return supermod_decreasing(v, p, n); }, false,
       "V-V'nu+V''nu^2(1-nu)/mu_lo strictly decreasing");
  if (include_virtual) {
    const double c_low = virtual_coef_low(f, p);
    const double c_high = virtual_coef_high(f, p);
    rep.notes.push_back("virtual-value coefficient at mu_lo: " + num(c_low));
    rep.notes.push_back("virtual-value coefficient at mu_hi: " + num(c_high));
    rep.record(strict_positive_violation(c_low, 1.0), "1+f(mu_lo)mu_lo/(lambda_hi+F(mu_lo)-1) positive", p.mu_lo,
               std::nullopt, std::nullopt, std::nullopt, p.lambda_hi);
    rep.record(strict_positive_violation(c_high, 1.0), "1-f(mu_hi)(1-mu_hi)/(lambda_lo+F(mu_hi)-1) positive",
               p.mu_hi, std::nullopt, std::nullopt, std::nullopt, p.lambda_lo);
    scan(low, [&](double n) { return virtual_increasing(v, f, p, n); }, true,
         "virtual-value expression (reveal-h side) strictly increasing");
    scan(high, [&](double n) { return virtual_decreasing(v, f, p, n); }, false,
         "virtual-value expression (reveal-l side) strictly decreasing");
  }
  rep.finish();
  return rep;
}

// ---------------------------------------------------------------------------
// Single crossing

double scd_low(const ValueFunction& v, double mu, double nu) {
  return -v(nu) + v(1.0) - v.derivative(nu) * (1.0 - nu) -
         v.second_derivative(nu) * nu * (1.0 - nu) * (1.0 - nu) / (1.0 - mu);
}

double scd_high(const ValueFunction& v, double mu, double nu) {
  return v(nu) - v(0.0) - v.derivative(nu) * nu + v.second_derivative(nu) * nu * nu * (1.0 - nu) / mu;
}

AssumptionReport scd_signs(const ValueFunction& v, double mu0, std::span<const GridPoint> points) {
  if (v.kind() != ValueKind::smooth) throw UnsupportedKind("single-crossing check needs a C2 value function");
  AssumptionReport rep;
  rep.condition = "single_crossing";
  rep.tolerance = 0.0;
  std::vector<double> mus;
  for (const auto& pt : points) {
    if (std::abs(pt.mu - mu0) <= kGuardBand) {
      ++rep.points_guarded;
      continue;
    }
    mus.push_back(pt.mu);
    if (pt.mu < mu0 && pt.nu < 1.0) {
      const double s = scd_low(v, pt.mu, pt.nu);
      rep.record(strict_positive_violation(s, 1.0), "d2DeltaV/dmu dp > 0 (reveal-h side)", pt.mu, std::nullopt,
                 pt.nu, std::nullopt, std::nullopt);
    } else if (pt.mu > mu0 && pt.nu > 0.0) {
      const double s = scd_high(v, pt.mu, pt.nu);
      rep.record(strict_positive_violation(-s, 1.0), "d2DeltaV/dmu dq < 0 (reveal-l side)", pt.mu, std::nullopt,
                 pt.nu, std::nullopt, std::nullopt);
    }
  }
  std::sort(mus.begin(), mus.end());
  mus.erase(std::unique(mus.begin(), mus.end()), mus.end());
  double worst_zero = 0.0;
  for (double m : mus) {
    const double z = m < mu0 ? scd_low(v, m, 1.0) : scd_high(v, m, 0.0);
    worst_zero = std::max(worst_zero, std::abs(z));
    rep.record(std::max(0.0, std::abs(z) - 1e-12), m < mu0 ? "d2DeltaV/dmu dp at nu=1 is zero"
                                                            : "d2DeltaV/dmu dq at nu=0 is zero",
               m, std::nullopt, m < mu0 ? 1.0 : 0.0, std::nullopt, std::nullopt);
  }
  rep.notes.push_back("largest |cross derivative| at its zero point: " + num(worst_zero));
  rep.finish();
  return rep;
}

// ---------------------------------------------------------------------------
// H-functions

HValues h_functions(double mu, double nu, double lambda, const ValueFunction& v, const BeliefDensity& f) {
  const double c = lambda + f.cdf(mu) - 1.0;
  const double fm = f.pdf(mu);
  const double vn = v(nu), d1 = v.derivative(nu), d2 = v.second_derivative(nu);
  HValues h;
  h.h1 = (fm * mu + c) * (vn + d1 * (1.0 - nu)) + c * d2 * nu * (1.0 - nu) * (1.0 - nu) / (1.0 - mu);
  h.h2 = (fm * (1.0 - mu) - c) * (vn - d1 * nu) - c * d2 * nu * nu * (1.0 - nu) / mu;
  return h;
}

const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::increasing: return "increasing";
    case Monotonicity::decreasing: return "decreasing";
    case Monotonicity::none: return "none";
  }
  return "?";
}

namespace {
Monotonicity classify(const std::vector<double>& nu, const std::vector<double>& y, double* break_at) {
  bool inc = true, dec = true;
  double first_break_inc = -1.0, first_break_dec = -1.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double scale = std::max(std::abs(y[i]), std::abs(y[i - 1]));
    if (strict_positive_violation(y[i] - y[i - 1], scale) > 0.0 && inc) {
      inc = false;
      first_break_inc = nu[i - 1];
    }
    if (strict_positive_violation(y[i - 1] - y[i], scale) > 0.0 && dec) {
      dec = false;
      first_break_dec = nu[i - 1];
    }
  }
  if (inc) return Monotonicity::increasing;
  if (dec) return Monotonicity::decreasing;
  if (break_at) *break_at = std::max(first_break_inc, first_break_dec);
  return Monotonicity::none;
}
}  // namespace

HScan h_scan(double mu, double lambda, const ValueFunction& v, const BeliefDensity& f,
             std::span<const double> nu_grid, std::optional<double> mu_lo, std::optional<double> mu_hi) {
  HScan s;
  const double mu0 = f.quantile(1.0 - lambda);
  if (std::abs(mu - mu0) <= kGuardBand) {
    s.guarded = true;
    s.pass = true;
    s.required = "none";
    return s;
  }
  std::vector<double> nus(nu_grid.begin(), nu_grid.end());
  std::sort(nus.begin(), nus.end());
  std::vector<double> y1, y2;
  for (double n : nus) {
    const auto h = h_functions(mu, n, lambda, v, f);
    y1.push_back(h.h1);
    y2.push_back(h.h2);
  }
  double b1 = 0.0, b2 = 0.0;
  s.h1 = classify(nus, y1, &b1);
  s.h2 = classify(nus, y2, &b2);
  if (mu < mu0) {
    s.region = (mu_lo && mu <= *mu_lo) ? 3 : 1;
  } else {
    s.region = (mu_hi && mu >= *mu_hi) ? 4 : 2;
  }
  const bool use_h1 = s.region == 2 || s.region == 3;
  s.required = use_h1 ? "H1" : "H2";
  const Monotonicity req = use_h1 ? s.h1 : s.h2;
  s.pass = req != Monotonicity::none;
  s.worst_nu = use_h1 ? b1 : b2;
  return s;
}

// ---------------------------------------------------------------------------
// Exclusion bound

AssumptionReport check_exclusion_bound(const ValueFunction& v, const BeliefDensity& f, double lambda_lo,
                                       double lambda_hi, double revenue) {
  AssumptionReport rep;
  rep.condition = "exclusion_bound";
  rep.tolerance = 0.0;
  // The lower point is read with the sign of the low threshold equation,
  // f(mu)mu/(lambda+F(mu)-1) = -1; with +1 it has no root below mu0.
  rep.notes.push_back("lower point solves f(mu)mu + (lambda_hi + F(mu) - 1) = 0");
  double upper = 0.0, lower = 0.0;
  try {
    upper = solve_thresholds(f, lambda_lo).mu_plus;
    lower = solve_thresholds(f, lambda_hi).mu_minus;
  } catch (const RootNotBracketed& e) {
    rep.inconclusive = true;
    rep.notes.push_back(std::string("no root in (0,1): ") + e.what());
    rep.finish();
    return rep;
  }
  auto gap = [&](double m) { return m * v(1.0) + (1.0 - m) * v(0.0) - v(m); };
  const double g_up = gap(upper), g_low = gap(lower);
  rep.notes.push_back("upper point " + num(upper) + " value " + num(g_up));
  rep.notes.push_back("lower point " + num(lower) + " value " + num(g_low));
  rep.notes.push_back("revenue " + num(revenue));
  const double worst = std::max(g_up, g_low);
  rep.record(std::max(0.0, worst - revenue + 1e-15), "max chord gap at the two points minus revenue",
             g_up >= g_low ? upper : lower, std::nullopt, std::nullopt, std::nullopt,
             g_up >= g_low ? lambda_lo : lambda_hi);
  rep.finish();
  return rep;
}

}  // namespace infomenu
