#pragma once

// Serialization of menus, reports and figures. Numbers are written with 17
// significant digits so files round-trip exactly.

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

#include "infomenu/assumptions.hpp"
#include "infomenu/comparative.hpp"
#include "infomenu/config.hpp"
#include "infomenu/menu_solver.hpp"
#include "infomenu/oracle.hpp"

namespace infomenu {

inline constexpr const char* kVersion = "infomenu 0.1.0";

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or unreadable input file.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_number(double x);

// Writes to a temporary sibling and renames it over `path`.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

inline constexpr const char* kMenuHeader = "mu,orientation,noise,posterior,price,surplus,gross_utility";
std::string menu_csv(const std::vector<MenuRecord>& records);
std::vector<MenuRecord> parse_menu_csv(const std::string& text);

// Long format: t followed by the menu columns.
inline constexpr const char* kSweepHeader = "t,mu,orientation,noise,posterior,price,surplus,gross_utility";
std::string sweep_csv(const FamilySweep& sweep);

nlohmann::ordered_json to_json(const ThresholdSet& t);
nlohmann::ordered_json to_json(const AssumptionReport& r);
nlohmann::ordered_json to_json(const IcIrReport& r);
nlohmann::ordered_json to_json(const MonotoneReport& r);
nlohmann::ordered_json to_json(const HScan& s);
nlohmann::ordered_json to_json(const FlatPrice& f);
nlohmann::ordered_json to_json(const RunConfig& c);
nlohmann::ordered_json to_json(const DiscreteInstance& inst);
nlohmann::ordered_json to_json(const DiscreteInstance& inst, const DiscreteMechanism& m);
nlohmann::ordered_json to_json(const GeneralExperiment& e);

// Figures are built from CSV text only.
// Menu: V(mu) solid, gross utility dashed; price and surplus below.
std::string menu_svg_from_csv(const std::string& csv);
// Sweep: gross utility and surplus per t.
std::string sweep_svg_from_csv(const std::string& csv);

}  // namespace infomenu
