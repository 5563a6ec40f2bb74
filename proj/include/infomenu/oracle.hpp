#pragma once

// Finite-type screening: exact optimal mechanisms over a catalog of
// experiments, global IC/IR verification and spot checks of the structure of
// the optimal menu.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infomenu/core_model.hpp"
#include "infomenu/menu_solver.hpp"

namespace infomenu {

struct DiscreteType {
  double belief = 0.0;
  double weight = 0.0;
};

// Catalog index 0 is always the null experiment and the full experiment is
// always present. Experiments are stored in canonical form without duplicates.
struct DiscreteInstance {
  std::vector<DiscreteType> types;
  std::vector<GeneralExperiment> catalog;
  ValueFunction v;
  // utility[j][c] = U(catalog[c], types[j].belief); outside[j] = V(belief).
  std::vector<std::vector<double>> utility;
  std::vector<double> outside;
  std::size_t full_index = 0;
};

DiscreteInstance make_instance(std::vector<DiscreteType> types, std::vector<GeneralExperiment> catalog,
                               const ValueFunction& v);

// n equally weighted types on [lo, hi] including both ends.
std::vector<DiscreteType> uniform_types(std::size_t n, double lo, double hi);
// null, full and reveal-h / reveal-l at noise step, 2*step, ... < 1.
std::vector<GeneralExperiment> simple_catalog(double step);
// Every experiment with at most three signals whose likelihood entries are
// multiples of `step`.
std::vector<GeneralExperiment> likelihood_grid_catalog(double step);

struct PriceResult {
  bool feasible = false;
  std::vector<double> prices;
  double revenue = 0.0;
  std::string reason;  // why infeasible
};

// Largest IC/IR prices for a fixed assignment: shortest paths from the IR
// root in the constraint graph. Negative cycles or negative prices make the
// assignment infeasible.
PriceResult best_prices_for_assignment(const DiscreteInstance& inst, std::span<const std::size_t> assignment);

struct DiscreteMechanism {
  std::vector<std::size_t> assignment;
  std::vector<double> prices;
  double revenue = 0.0;
  bool exhaustive = false;  // certified optimal over the catalog
  std::string mode;         // "exhaustive" or "local_search"
  std::uint64_t nodes = 0;
};

struct OracleOptions {
  std::uint64_t budget = 2'000'000;  // branch-and-bound nodes
  std::size_t restarts = 64;
  std::uint64_t seed = 20240601;
  std::optional<std::vector<std::size_t>> incumbent;  // warm start
};

// Exact optimum by depth-first branch and bound; falls back to multi-start
// local search when the node budget runs out. Equal revenues (within 1e-12)
// resolve to the lexicographically smallest assignment.
DiscreteMechanism brute_force_optimal(const DiscreteInstance& inst, const OracleOptions& opts = {});
DiscreteMechanism local_search(const DiscreteInstance& inst, const OracleOptions& opts = {});

struct IcIrReport {
  bool pass = true;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::string kind;  // "IC" or "IR"
  double mu = 0.0;
  std::size_t type_index = 0;
  std::optional<std::size_t> deviation;  // offending contract index, none for IR
  std::size_t types_checked = 0;
};

// own[k] indexes the contract held by type beliefs[k].
IcIrReport verify_ic_ir(std::span<const MenuContract> contracts, std::span<const double> beliefs,
                        std::span<const std::size_t> own, const ValueFunction& v, double tol);
// Each record is a type holding its own contract; all records are offered.
IcIrReport verify_ic_ir(const OptimalMenu& menu, const ValueFunction& v, double tol);
IcIrReport verify_ic_ir(const DiscreteInstance& inst, const DiscreteMechanism& m, double tol);

struct ThreeSignalReport {
  double base_revenue = 0.0;
  double extended_revenue = 0.0;
  double gain = 0.0;
  bool pass = false;
  bool base_exhaustive = false;
  bool extended_exhaustive = false;
  std::size_t base_catalog = 0;
  std::size_t extended_catalog = 0;
  DiscreteMechanism extended;
};

// Adds every experiment with up to three signals on the likelihood grid to
// the instance's catalog and re-solves from the base optimum.
ThreeSignalReport three_signal_no_improvement(const DiscreteInstance& base, double grid_step, double tol,
                                              const OracleOptions& opts = {});

struct PatternReport {
  bool applicable = true;
  bool pass = true;
  std::optional<double> offending_belief;
  std::string detail;
};

// Served types below mu0 hold reveal-h or full; above mu0 reveal-l or full.
PatternReport revealed_state_pattern(const DiscreteInstance& inst, const DiscreteMechanism& m, double mu0);
PatternReport revealed_state_pattern(const OptimalMenu& menu);

}  // namespace infomenu
