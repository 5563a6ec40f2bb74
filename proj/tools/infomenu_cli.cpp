#include <CLI11.hpp>

#include <iostream>

#include "infomenu/commands.hpp"
#include "infomenu/reports.hpp"

int main(int argc, char** argv) {
  using namespace infomenu;
  CLI::App app{"Revenue-maximizing menus of information experiments"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);

  std::string config_path;
  Overrides o;
  std::string out;
  std::size_t grid = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;

  const char* names[] = {"solve", "verify", "oracle", "sweep", "flat", "assumptions"};
  const char* help[] = {"Build the optimal menu and write CSV, JSON and SVG artifacts",
                        "Check a menu file for global IC/IR and the model assumptions",
                        "Compare the closed-form menu with a finite-type exact optimum",
                        "Solve a rotation family and check the comparative statics",
                        "Optimal flat price for the fully revealing experiment",
                        "Run the regularity checks and H-function scan"};
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "YAML run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory (overrides output)");
    sub->add_option("--grid", grid, "Menu grid size (overrides grid.menu)");
    sub->add_option("--tol", tol, "Verification tolerance (overrides tolerances.verify)");
    sub->add_option("--seed", seed, "Local-search seed (overrides seed)");
    sub->add_flag("--override-assumptions", o.override_assumptions, "Solve even when assumption checks fail");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommands().front();
  try {
    RunConfig cfg = config_path.empty() ? parse_config_text("") : parse_config_file(config_path);
    if (sub->count("--out")) o.out = out;
    if (sub->count("--grid")) o.grid = grid;
    if (sub->count("--tol")) o.tol = tol;
    if (sub->count("--seed")) o.seed = seed;
    apply_overrides(cfg, o);
    return run_command(command, cfg, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitInputError;
  }
}
