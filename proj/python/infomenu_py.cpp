#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "infomenu/commands.hpp"
#include "infomenu/comparative.hpp"
#include "infomenu/config.hpp"
#include "infomenu/errors.hpp"
#include "infomenu/menu_solver.hpp"
#include "infomenu/oracle.hpp"
#include "infomenu/reports.hpp"

namespace py = pybind11;
using namespace infomenu;

PYBIND11_MODULE(_infomenu, m) {
  m.doc() = "Revenue-maximizing menus of information experiments";
  m.attr("__version__") = kVersion;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UnsupportedKind>(m, "UnsupportedKind", PyExc_TypeError);
  py::register_exception<RootNotBracketed>(m, "RootNotBracketed", PyExc_RuntimeError);
  py::register_exception<AssumptionRefusal>(m, "AssumptionRefusal", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

  py::class_<Action>(m, "Action")
      .def(py::init([](double l, double h) { return Action{l, h}; }), py::arg("payoff_l"), py::arg("payoff_h"))
      .def_readwrite("payoff_l", &Action::payoff_l)
      .def_readwrite("payoff_h", &Action::payoff_h);

  py::class_<ValueFunction>(m, "ValueFunction")
      .def_static("quadratic", &ValueFunction::quadratic, py::arg("scale") = 1.0)
      .def_static("polynomial", &ValueFunction::polynomial, py::arg("coefficients"))
      .def_static("from_actions",
                  [](const std::vector<std::pair<double, double>>& table) {
                    std::vector<Action> acts;
                    for (const auto& [l, h] : table) acts.push_back({l, h});
                    return ValueFunction::from_actions(std::move(acts));
                  },
                  py::arg("table"), "Actions as (payoff_l, payoff_h) pairs")
      .def_static("four_action", [] { return ValueFunction::from_actions(four_action_table()); })
      .def("__call__", &ValueFunction::operator())
      .def("derivative", &ValueFunction::derivative)
      .def("second_derivative", &ValueFunction::second_derivative)
      .def_property_readonly("name", &ValueFunction::name)
      .def_property_readonly("smooth", [](const ValueFunction& v) { return v.kind() == ValueKind::smooth; });

  py::class_<BeliefDensity>(m, "BeliefDensity")
      .def_static("uniform", &BeliefDensity::uniform)
      .def_static("triangular", &BeliefDensity::triangular)
      .def_static("tilted", &BeliefDensity::tilted, py::arg("slope"))
      .def_static("piecewise_linear",
                  [](std::vector<double> k, std::vector<double> v) {
                    return BeliefDensity::piecewise_linear(std::move(k), std::move(v));
                  },
                  py::arg("knots"), py::arg("values"))
      .def_static("rotation", &rotation_density, py::arg("base"), py::arg("t"))
      .def("pdf", &BeliefDensity::pdf)
      .def("cdf", &BeliefDensity::cdf)
      .def("quantile", &BeliefDensity::quantile)
      .def_property_readonly("name", &BeliefDensity::name);

  py::enum_<Orientation>(m, "Orientation")
      .value("reveal_h", Orientation::reveal_h)
      .value("reveal_l", Orientation::reveal_l)
      .value("full", Orientation::full)
      .value("null", Orientation::null);

  py::class_<SimpleExperiment>(m, "SimpleExperiment")
      .def_static("reveal_h", &SimpleExperiment::reveal_h, py::arg("p"))
      .def_static("reveal_l", &SimpleExperiment::reveal_l, py::arg("q"))
      .def_static("full", &SimpleExperiment::full)
      .def_static("null", &SimpleExperiment::null)
      .def_readonly("orientation", &SimpleExperiment::orientation)
      .def_readonly("noise", &SimpleExperiment::noise)
      .def("__eq__", [](const SimpleExperiment& a, const SimpleExperiment& b) { return a == b; })
      .def("__repr__", [](const SimpleExperiment& e) {
        std::ostringstream os;
        os << "SimpleExperiment(" << to_string(e.orientation) << ", " << e.noise << ")";
        return os.str();
      });

  m.def("posterior", py::overload_cast<const SimpleExperiment&, std::size_t, double>(&posterior),
        py::arg("experiment"), py::arg("signal"), py::arg("prior"));
  m.def("experiment_value",
        py::overload_cast<const SimpleExperiment&, double, const ValueFunction&>(&experiment_value));
  m.def("delta_v", &delta_v, py::arg("mu"), py::arg("experiment"), py::arg("v"));
  m.def("delta_v_mu", &delta_v_mu, py::arg("mu"), py::arg("experiment"), py::arg("v"));

  py::class_<ThresholdSet>(m, "ThresholdSet")
      .def_readonly("lam", &ThresholdSet::lambda)
      .def_readonly("mu0", &ThresholdSet::mu0)
      .def_readonly("mu_minus", &ThresholdSet::mu_minus)
      .def_readonly("mu_plus", &ThresholdSet::mu_plus)
      .def_readonly("exclusion_lo", &ThresholdSet::exclusion_lo)
      .def_readonly("exclusion_hi", &ThresholdSet::exclusion_hi);

  py::class_<MenuRecord>(m, "MenuRecord")
      .def_readonly("mu", &MenuRecord::mu)
      .def_readonly("contract", &MenuRecord::contract)
      .def_readonly("posterior", &MenuRecord::posterior)
      .def_readonly("price", &MenuRecord::price)
      .def_readonly("surplus", &MenuRecord::surplus)
      .def_readonly("gross_utility", &MenuRecord::gross_utility);

  py::class_<AssumptionReport>(m, "AssumptionReport")
      .def_readonly("condition", &AssumptionReport::condition)
      .def_readonly("passed", &AssumptionReport::pass)
      .def_readonly("worst_violation", &AssumptionReport::worst_violation)
      .def_readonly("notes", &AssumptionReport::notes);

  py::class_<OptimalMenu>(m, "OptimalMenu")
      .def_readonly("thresholds", &OptimalMenu::thresholds)
      .def_readonly("records", &OptimalMenu::records)
      .def_readonly("revenue", &OptimalMenu::revenue)
      .def_readonly("assumptions", &OptimalMenu::assumptions)
      .def_readonly("warnings", &OptimalMenu::warnings)
      .def("surplus_at", &OptimalMenu::surplus_at)
      .def("price_at", &OptimalMenu::price_at)
      .def("to_csv", [](const OptimalMenu& menu) { return menu_csv(menu.records); });

  m.def("solve_thresholds", &solve_thresholds, py::arg("f"), py::arg("lam"));
  m.def("solve_lambda", [](const ValueFunction& v, const BeliefDensity& f) { return solve_lambda(v, f); });
  m.def("build_menu",
        [](const ValueFunction& v, const BeliefDensity& f, std::size_t grid, bool override_assumptions) {
          MenuOptions o;
          o.grid = grid;
          o.override_assumptions = override_assumptions;
          return build_menu(v, f, o);
        },
        py::arg("v"), py::arg("f"), py::arg("grid") = 1001, py::arg("override_assumptions") = false);

  py::class_<FlatPrice>(m, "FlatPrice")
      .def_readonly("price", &FlatPrice::price)
      .def_readonly("revenue", &FlatPrice::revenue)
      .def_readonly("served", &FlatPrice::served);
  m.def("flat_price_optimum", &flat_price_optimum, py::arg("v"), py::arg("f"));

  py::class_<IcIrReport>(m, "IcIrReport")
      .def_readonly("passed", &IcIrReport::pass)
      .def_readonly("worst_violation", &IcIrReport::worst_violation)
      .def_readonly("kind", &IcIrReport::kind)
      .def_readonly("mu", &IcIrReport::mu)
      .def_readonly("type_index", &IcIrReport::type_index);
  m.def("verify_menu", [](const OptimalMenu& menu, const ValueFunction& v, double tol) {
    return verify_ic_ir(menu, v, tol);
  }, py::arg("menu"), py::arg("v"), py::arg("tol") = 1e-7);

  py::class_<DiscreteMechanism>(m, "DiscreteMechanism")
      .def_readonly("assignment", &DiscreteMechanism::assignment)
      .def_readonly("prices", &DiscreteMechanism::prices)
      .def_readonly("revenue", &DiscreteMechanism::revenue)
      .def_readonly("exhaustive", &DiscreteMechanism::exhaustive)
      .def_readonly("mode", &DiscreteMechanism::mode);
  m.def("oracle_optimum",
        [](const std::vector<std::pair<double, double>>& types, const std::vector<SimpleExperiment>& catalog,
           const ValueFunction& v, std::uint64_t budget) {
          std::vector<DiscreteType> ts;
          for (const auto& [b, w] : types) ts.push_back({b, w});
          std::vector<GeneralExperiment> cat;
          for (const auto& e : catalog) cat.push_back(e.to_general());
          OracleOptions o;
          o.budget = budget;
          return brute_force_optimal(make_instance(std::move(ts), std::move(cat), v), o);
        },
        py::arg("types"), py::arg("catalog"), py::arg("v"), py::arg("budget") = 2'000'000,
        "Types as (belief, weight) pairs. Null and full are always in the catalog.");

  m.def("is_more_dispersed", [](const BeliefDensity& f, const BeliefDensity& g) {
    return is_more_dispersed(f, g).more_dispersed;
  });

  m.def("run",
        [](const std::string& command, const std::string& config_text, const std::string& out) {
          RunConfig cfg = parse_config_text(config_text);
          cfg.output = out;
          std::ostringstream log, err;
          const int code = run_command(command, cfg, log, err);
          return py::make_tuple(code, log.str(), err.str());
        },
        py::arg("command"), py::arg("config_text"), py::arg("out"),
        "Runs a CLI subcommand; returns (exit_code, log, errors).");
}
