#pragma once

// Revenue-maximizing menu of simple experiments for a continuum of buyer
// beliefs: multiplier, segmentation thresholds, first-order-condition
// posteriors, envelope prices and the flat-price benchmark.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "infomenu/assumptions.hpp"
#include "infomenu/core_model.hpp"

namespace infomenu {

enum class Side { low, high };

// mu0 splits reveal-h (below) from reveal-l (above) contracts; the full
// experiment is sold on [mu_minus, mu_plus]; types outside
// [exclusion_lo, exclusion_hi] get the null contract.
struct ThresholdSet {
  double lambda = 0.5;
  double mu0 = 0.5;
  double mu_minus = 0.0;
  double mu_plus = 1.0;
  double exclusion_lo = 0.0;
  double exclusion_hi = 1.0;
};

// f(mu) mu + (lambda + F(mu) - 1) on the low side.
double lower_threshold_residual(const BeliefDensity& f, double lambda, double mu);
// f(mu)(1 - mu) - (lambda + F(mu) - 1) on the high side.
double upper_threshold_residual(const BeliefDensity& f, double lambda, double mu);

// Exclusion points are left at 0 and 1.
ThresholdSet solve_thresholds(const BeliefDensity& f, double lambda);

// First-order condition for the noisy posterior nu of type mu.
//   high side: (1 - f(1-mu)/(lambda+F-1)) (V(nu) - V(0) - nu V'(nu)) + V''(nu) nu^2 (1-nu)/mu
//   low side:  (1 + f mu/(lambda+F-1)) (V(nu) - V(1) + (1-nu) V'(nu)) + V''(nu) nu (1-nu)^2/(1-mu)
double foc_residual(Side side, double mu, double nu, double lambda, const ValueFunction& v,
                    const BeliefDensity& f);

struct FocSolution {
  double posterior = 0.0;  // contract posterior after clamping
  double residual = 0.0;   // FOC residual at the unclamped root (0 when clamped)
  bool clamped = false;    // no interior root: posterior == mu, type excluded
  bool full = false;       // mu inside [mu_minus, mu_plus]: posterior at 0 or 1
};

// Side chosen by mu against mu0 = F^{-1}(1 - lambda).
FocSolution solve_foc_posterior(double mu, double lambda, const ValueFunction& v,
                                const BeliefDensity& f);
FocSolution solve_foc_posterior(double mu, const ThresholdSet& t, const ValueFunction& v,
                                const BeliefDensity& f);

// Noise parameter of the simple experiment that moves mu to nu with its noisy
// signal: reveal_l needs nu in [mu, 1], reveal_h needs nu in [0, mu].
double noise_from_posterior(double mu, double nu, Orientation orientation);

// Outermost served belief on the given side; 0 or 1 when every type is served.
double exclusion_point(double lambda, const ValueFunction& v, const BeliefDensity& f, Side side);

// Thresholds plus both exclusion points at the given multiplier.
ThresholdSet menu_thresholds(double lambda, const ValueFunction& v, const BeliefDensity& f);

// Optimal contract for type mu given fully solved thresholds.
SimpleExperiment contract_at(double mu, const ThresholdSet& t, const ValueFunction& v,
                             const BeliefDensity& f);

struct MenuRecord {
  double mu = 0.0;
  SimpleExperiment contract;
  double posterior = 0.0;
  double price = 0.0;
  double surplus = 0.0;
  double gross_utility = 0.0;
  bool clamped = false;
  double foc_residual = 0.0;
};

struct OptimalMenu {
  ThresholdSet thresholds;
  std::vector<MenuRecord> records;  // sorted by mu
  double revenue = 0.0;
  std::vector<AssumptionReport> assumptions;
  std::vector<std::string> warnings;

  // Linear interpolation between grid records.
  double surplus_at(double mu) const;
  double price_at(double mu) const;
};

struct MenuOptions {
  std::size_t grid = 1001;
  double lambda_lo = 0.05;
  double lambda_hi = 0.95;
  bool override_assumptions = false;
  bool check_assumptions = true;
  std::size_t assumption_grid = 512;
};

struct LambdaTrace {
  std::vector<double> lambdas;
  std::vector<double> residuals;
};

// Multiplier on the surplus-accounting constraint. Exactly 0.5 for symmetric
// V and f, otherwise the bracketed root of lambda_residual.
double solve_lambda(const ValueFunction& v, const BeliefDensity& f, const MenuOptions& opts = {},
                    LambdaTrace* trace = nullptr);
// Integral over [0,1] of dDeltaV/dmu along the lambda-induced menu.
double lambda_residual(double lambda, const ValueFunction& v, const BeliefDensity& f,
                       std::size_t grid);

// Contract curve on the threshold-augmented grid (prices not yet filled).
std::vector<MenuRecord> contract_curve(const ThresholdSet& t, const ValueFunction& v,
                                       const BeliefDensity& f, std::size_t grid);
// Fills surplus and price by integrating dDeltaV/dmu from both outer ends.
void price_schedule(std::vector<MenuRecord>& records, double mu0, const ValueFunction& v);
// Integral of price * f over the grid.
double revenue(std::span<const MenuRecord> records, const BeliefDensity& f);
double revenue(const OptimalMenu& menu, const BeliefDensity& f);

struct FlatPrice {
  double price = 0.0;
  double revenue = 0.0;
  // Union of intervals of served beliefs (gain from full revelation >= price).
  std::vector<std::pair<double, double>> served;
};

// Best single price for the fully revealing experiment. Works for both value
// kinds.
FlatPrice flat_price_optimum(const ValueFunction& v, const BeliefDensity& f);
// Revenue of the full experiment sold at `price` to beliefs drawn from f.
double flat_revenue(const ValueFunction& v, const BeliefDensity& f, double price,
                    std::vector<std::pair<double, double>>* served = nullptr);

// Refusal when assumption checks fail and no override was given.
class AssumptionRefusal : public std::runtime_error {
 public:
  explicit AssumptionRefusal(std::vector<AssumptionReport> reports);
  const std::vector<AssumptionReport>& reports() const noexcept { return reports_; }

 private:
  std::vector<AssumptionReport> reports_;
};

// The gating checks run by build_menu: monotone likelihood ratio at the
// solved multiplier, supermodularity (plus the virtual-value conditions for
// asymmetric problems) and single-crossing signs over the menu's posterior
// ranges.
std::vector<AssumptionReport> check_assumptions(const ValueFunction& v, const BeliefDensity& f, const ThresholdSet& t,
                                                std::size_t grid);

OptimalMenu build_menu(const ValueFunction& v, const BeliefDensity& f, const MenuOptions& opts = {});

}  // namespace infomenu
