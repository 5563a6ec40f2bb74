#pragma once

// Numerical checks of the regularity conditions behind the closed-form menu.
// Monotonicity is tested by adjacent differences on caller-supplied grids.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infomenu/core_model.hpp"

namespace infomenu {

inline constexpr double kGuardBand = 1e-6;
inline constexpr double kMonotoneTol = 1e-9;

// Worst violation of one condition. For adjacent-difference checks `mu` and
// `mu_next` (or `nu` and `nu_next`) are the pair of grid points that produced
// it; `expression` names the quantity compared.
struct AssumptionReport {
  std::string condition;
  bool pass = true;
  bool inconclusive = false;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::string expression;
  std::optional<double> mu, mu_next, nu, nu_next, lambda;
  std::size_t points_checked = 0;
  std::size_t points_guarded = 0;
  std::vector<std::string> notes;

  void record(double violation, std::string expr, std::optional<double> mu_, std::optional<double> mu_next_,
              std::optional<double> nu_, std::optional<double> nu_next_, std::optional<double> lambda_);
  void finish();
};

std::vector<double> interior_grid(std::size_t n, double lo = 0.0, double hi = 1.0);

// Ratio tested for monotone likelihood on each side of F^{-1}(1 - lambda).
double mlr_ratio_high(const BeliefDensity& f, double lambda, double mu);  // f(1-mu)/(lambda+F-1)
double mlr_ratio_low(const BeliefDensity& f, double lambda, double mu);   // f mu/(lambda+F-1)

AssumptionReport check_mlr(const BeliefDensity& f, std::span<const double> lambda_grid,
                           std::span<const double> mu_grid);

// The four supermodularity / virtual-value expressions as functions of nu.
struct SupermodParams {
  double mu_lo = 0.2;
  double mu_hi = 0.8;
  double lambda_lo = 0.5;
  double lambda_hi = 0.5;
};
double supermod_increasing(const ValueFunction& v, const SupermodParams& p, double nu);
double supermod_decreasing(const ValueFunction& v, const SupermodParams& p, double nu);
double virtual_increasing(const ValueFunction& v, const BeliefDensity& f, const SupermodParams& p, double nu);
double virtual_decreasing(const ValueFunction& v, const BeliefDensity& f, const SupermodParams& p, double nu);

// The increasing expressions are checked on nu_grid points <= mu_lo, the
// decreasing ones on points >= mu_hi: the posterior ranges of reveal-h and
// reveal-l contracts respectively. include_virtual adds the two
// lambda-dependent conditions.
AssumptionReport check_supermod_virtual(const ValueFunction& v, const BeliefDensity& f,
                                        const SupermodParams& p, std::span<const double> nu_grid,
                                        bool include_virtual = true);

// Cross derivatives of the surplus in (mu, posterior).
double scd_low(const ValueFunction& v, double mu, double nu);   // reveal-h side, zero at nu = 1
double scd_high(const ValueFunction& v, double mu, double nu);  // reveal-l side, zero at nu = 0

struct GridPoint {
  double mu = 0.0;
  double nu = 0.0;
};
// scd_low > 0 for mu < mu0 with nu < 1, scd_high < 0 for mu > mu0 with nu > 0,
// and both zero points.
AssumptionReport scd_signs(const ValueFunction& v, double mu0, std::span<const GridPoint> points);

// Appendix H-functions with coefficient (lambda + F(mu) - 1).
struct HValues {
  double h1 = 0.0;
  double h2 = 0.0;
};
HValues h_functions(double mu, double nu, double lambda, const ValueFunction& v, const BeliefDensity& f);

enum class Monotonicity { increasing, decreasing, none };
const char* to_string(Monotonicity m);

struct HScan {
  int region = 0;                       // 0 when guarded
  bool guarded = false;                 // mu within the guard band of mu0
  Monotonicity h1 = Monotonicity::none;
  Monotonicity h2 = Monotonicity::none;
  std::string required;                 // "H1" or "H2"
  bool pass = false;
  double worst_nu = 0.0;                // first nu where the required function turns
};
// Region numbering follows the appendix argument: 3 = (0, mu_lo] uses H1,
// 1 = [mu_lo, mu0] uses H2, 2 = [mu0, mu_hi] uses H1, 4 = [mu_hi, 1) uses H2.
// Without bounds only regions 1 and 2 occur.
HScan h_scan(double mu, double lambda, const ValueFunction& v, const BeliefDensity& f,
             std::span<const double> nu_grid, std::optional<double> mu_lo = std::nullopt,
             std::optional<double> mu_hi = std::nullopt);

// Excluded extreme types must not be worth more than the menu's revenue.
AssumptionReport check_exclusion_bound(const ValueFunction& v, const BeliefDensity& f, double lambda_lo,
                                       double lambda_hi, double revenue);

}  // namespace infomenu
