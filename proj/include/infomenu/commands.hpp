#pragma once

// Subcommands of the command-line tool. Each writes its artifacts under the
// configured output directory and returns a process exit code:
//   0 success, 1 verification failure, 2 input error, 3 solver failure.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "infomenu/config.hpp"
#include "infomenu/menu_solver.hpp"
#include "infomenu/oracle.hpp"

namespace infomenu {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitSolverFailure = 3;

// Command-line flags that override config keys.
struct Overrides {
  std::optional<std::string> out;
  std::optional<std::size_t> grid;  // menu grid
  std::optional<double> tol;        // verification tolerance
  std::optional<std::uint64_t> seed;
  bool override_assumptions = false;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);

MenuOptions menu_options(const RunConfig& cfg);

// The closed-form menu evaluated at the types of a discrete instance.
struct Restriction {
  std::vector<MenuContract> contracts;  // one per type
  double revenue = 0.0;                 // sum of weight * closed-form price
  IcIrReport feasibility;               // IC/IR among the discrete types
};
Restriction closed_form_restriction(const OptimalMenu& menu, const DiscreteInstance& inst, const ValueFunction& v,
                                    const BeliefDensity& f, double tol);

// Solver ran out of nodes and the local-search fallback is disabled.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_oracle(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_flat(const RunConfig& cfg, std::ostream& log);
int cmd_assumptions(const RunConfig& cfg, std::ostream& log);

// Dispatches by name and maps exceptions to exit codes, printing the message
// to `err`.
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace infomenu
