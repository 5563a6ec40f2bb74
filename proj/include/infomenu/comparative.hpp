#pragma once

// Comparative statics of the optimal menu across a family of symmetric belief
// densities ordered by dispersion.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infomenu/core_model.hpp"
#include "infomenu/menu_solver.hpp"

namespace infomenu {

// Pivot c of the rotation: the low threshold of `base` at lambda = 0.5.
double rotation_pivot(const BeliefDensity& base);
// Largest t keeping base + t*r non-negative.
double rotation_max_t(const BeliefDensity& base);

// f_t = base + t*r. On [0, 0.5], r(mu) = c - mu below the pivot c and
// b(c - mu) above it, with b chosen so r integrates to zero on the half; r is
// mirrored onto [0.5, 1]. Mass moves from the center to the tails as t grows.
BeliefDensity rotation_density(const BeliefDensity& base, double t);

struct DispersionReport {
  bool more_dispersed = false;
  // Upper end of the comparison range: g(mu)mu + G(mu) - 0.5 = 0.
  double mu_minus_g = 0.0;
  // Root of g(mu) + G(mu) - 0.5 = 0 in (0, 0.5) when one exists.
  std::optional<double> alternate_root;
  double worst_margin = 0.0;  // min over the grid of f-ratio minus g-ratio
  double worst_mu = 0.0;
  std::size_t points = 0;
  std::vector<std::string> notes;
};

// f more dispersed than g: f/(0.5 - F) >= g/(0.5 - G) on (0, mu_minus_g),
// checked on a 512-point grid with tolerance 1e-10.
DispersionReport is_more_dispersed(const BeliefDensity& f, const BeliefDensity& g);

enum class BlackwellOrder { dominates, dominated, equal, incomparable };
const char* to_string(BlackwellOrder o);
BlackwellOrder blackwell_compare(const SimpleExperiment& a, const SimpleExperiment& b);

struct FamilyMember {
  double t = 0.0;
  bool ok = false;
  std::string error;
  OptimalMenu menu;
};

struct FamilySweep {
  std::vector<FamilyMember> members;  // sorted by t
  std::optional<BeliefDensity> base;
  std::optional<ValueFunction> v;
};

FamilySweep solve_family(const BeliefDensity& base, std::span<const double> ts, const ValueFunction& v,
                         const MenuOptions& opts = {});

struct MonotoneReport {
  bool pass = true;
  double worst = 0.0;  // largest violation beyond the slack
  std::vector<std::string> violations;
};

inline constexpr double kComparativeSlack = 1e-8;

// mu_minus and the low exclusion point nonincreasing in t, mu_plus and the
// high exclusion point nondecreasing.
MonotoneReport thresholds_monotone(const FamilySweep& sweep);
// The contract at each probe under a larger t Blackwell-dominates the one
// under a smaller t.
MonotoneReport blackwell_monotone(const FamilySweep& sweep, std::span<const double> probes);
// Surplus at each probe nondecreasing in t.
MonotoneReport surplus_monotone(const FamilySweep& sweep, std::span<const double> probes);
// Consecutive members ordered by is_more_dispersed.
MonotoneReport dispersion_chain(const BeliefDensity& base, std::span<const double> ts);

}  // namespace infomenu
