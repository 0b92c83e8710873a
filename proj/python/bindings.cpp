#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "semlab/controls.hpp"
#include "semlab/generate.hpp"
#include "semlab/heat.hpp"
#include "semlab/inequalities.hpp"
#include "semlab/scenario.hpp"
#include "semlab/spectral.hpp"
#include "semlab/suite.hpp"
#include "semlab/transport.hpp"

namespace py = pybind11;
using namespace semlab;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict certificate(const TransportCertificate& c) {
  py::dict out;
  out["value"] = c.value;
  out["potential"] = c.potential;
  out["primal_value"] = c.primal_value;
  out["duality_gap"] = c.duality_gap;
  out["plan"] = c.plan ? py::cast(*c.plan) : py::none();
  return out;
}

py::dict cheeger(const CheegerResult& r) {
  py::dict out;
  out["value"] = r.value;
  std::vector<Index> witness;
  for (Index x = 0; x < r.witness.size(); ++x)
    if (r.witness.contains(x)) witness.push_back(x);
  out["witness"] = witness;
  out["exact"] = r.exact;
  return out;
}

py::list reports(const std::vector<InequalityReport>& rs) {
  py::list out;
  for (const auto& r : rs) out.append(to_python(report_to_json(r)));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Heat-smoothing inequalities on finite metric measure spaces";

  py::register_exception<Error>(m, "SemlabError", PyExc_ValueError);

  py::class_<GeneratedSpace>(m, "Space")
      .def(py::init([](const Matrix& d, const Vector& masses, const Matrix& w, bool calibrate) {
             MetricMeasureSpace space(d, masses);
             DirichletStructure dirichlet(space, w);
             if (calibrate) return GeneratedSpace{calibrate_metric(space, dirichlet), dirichlet};
             return GeneratedSpace{space, dirichlet};
           }),
           py::arg("distances"), py::arg("masses"), py::arg("conductances"), py::arg("calibrate") = false)
      .def_static("generate", py::overload_cast<const std::string&>(&generate_space), py::arg("spec"))
      .def_static("load", &resolve_space, py::arg("spec"))
      .def_static("from_json", &space_from_json, py::arg("text"))
      .def("to_json", &space_to_json)
      .def_property_readonly("n", [](const GeneratedSpace& g) { return g.space.size(); })
      .def_property_readonly("distances", [](const GeneratedSpace& g) { return g.space.distances(); })
      .def_property_readonly("masses", [](const GeneratedSpace& g) { return g.space.masses(); })
      .def_property_readonly("conductances", [](const GeneratedSpace& g) { return g.dirichlet.conductances(); })
      .def("calibration_ratio", [](const GeneratedSpace& g) { return calibration_ratio(g.space, g.dirichlet); })
      .def("laplacian", [](const GeneratedSpace& g, const Density& f) { return laplacian_apply(g.dirichlet, f); })
      .def("carre_du_champ", [](const GeneratedSpace& g, const Density& f) { return carre_du_champ(g.dirichlet, f); })
      .def("cheeger_energy", [](const GeneratedSpace& g, const Density& f) { return cheeger_energy(g.dirichlet, f); })
      .def("total_variation", [](const GeneratedSpace& g, const Density& f) { return total_variation(g.dirichlet, f); })
      .def("perimeter",
           [](const GeneratedSpace& g, const std::vector<Index>& points) {
             SubsetIndicator s;
             s.mask.assign(static_cast<std::size_t>(g.space.size()), false);
             for (Index x : points) {
               if (x < 0 || x >= g.space.size()) throw Error("point index out of range");
               s.mask[static_cast<std::size_t>(x)] = true;
             }
             return perimeter(g.dirichlet, s);
           })
      .def("lipschitz", [](const GeneratedSpace& g, const Density& f) { return lipschitz_constant(g.space, f); })
      .def("w1",
           [](const GeneratedSpace& g, const Density& f0, const Density& f1) {
             return certificate(w1(g.space, AtomicMeasure::from_density(g.space, f0),
                                   AtomicMeasure::from_density(g.space, f1)));
           },
           py::arg("f0"), py::arg("f1"), "W1(f0 m, f1 m) for densities f0, f1 >= 0 of equal mass")
      .def("bl_star",
           [](const GeneratedSpace& g, const Density& f0, const Density& f1) {
             return certificate(bl_star(g.space, AtomicMeasure::from_density(g.space, f0),
                                        AtomicMeasure::from_density(g.space, f1)));
           },
           py::arg("f0"), py::arg("f1"))
      .def("h1", [](const GeneratedSpace& g) {
        const HeatOperator heat(g.space, g.dirichlet);
        return cheeger(h1_best(g.space, g.dirichlet, heat));
      });

  py::class_<HeatOperator>(m, "Heat")
      .def(py::init([](const GeneratedSpace& g) { return HeatOperator(g.space, g.dirichlet); }), py::arg("space"))
      .def_property_readonly("eigenvalues", &HeatOperator::eigenvalues)
      .def_property_readonly("eigenvectors", &HeatOperator::eigenvectors)
      .def("apply", &HeatOperator::apply, py::arg("t"), py::arg("f"))
      .def("kernel", &HeatOperator::kernel, py::arg("t"))
      .def("c_star", &HeatOperator::c_star, py::arg("t"))
      .def("c_star_pair", &HeatOperator::c_star_pair, py::arg("t"))
      .def("theta", &HeatOperator::theta, py::arg("t"))
      .def("C_star", [](const HeatOperator& h, double t) { return integrate_c_star(h, 0.0, t); }, py::arg("t"))
      .def("sweep",
           [](const HeatOperator& h, const std::vector<double>& grid) {
             const SmoothingProfile p(h, grid);
             py::dict out;
             out["t"] = p.grid();
             out["c_star"] = p.c_star_values();
             out["C_star"] = p.primitive_values();
             out["theta"] = p.theta_values();
             return out;
           },
           py::arg("grid"));

  py::class_<ControlModel>(m, "Control")
      .def_static("power", &ControlModel::power, py::arg("M"), py::arg("b"), py::arg("horizon") = 1.0)
      .def_static("power_log", &ControlModel::power_log, py::arg("M"), py::arg("a"), py::arg("b"),
                  py::arg("horizon") = 1.0)
      .def_static("reference_rcd", &ControlModel::reference_rcd, py::arg("K"), py::arg("M"))
      .def_static("from_json",
                  [](const std::string& text) {
                    try {
                      return ControlModel::from_json(nlohmann::json::parse(text));
                    } catch (const nlohmann::json::exception& e) {
                      throw Error(std::string("control description: ") + e.what());
                    }
                  },
                  py::arg("text"))
      .def("to_json", [](const ControlModel& c) { return c.to_json().dump(); })
      .def_property_readonly("kind", &ControlModel::kind)
      .def_property_readonly("horizon", &ControlModel::horizon)
      .def_property_readonly("M", [](const ControlModel& c) -> py::object {
        if (auto p = c.as_power()) return py::float_(p->M);
        return py::none();
      })
      .def_property_readonly("b", [](const ControlModel& c) -> py::object {
        if (auto p = c.as_power()) return py::float_(p->b);
        return py::none();
      })
      .def("__call__", &ControlModel::eval, py::arg("t"))
      .def("primitive", &ControlModel::primitive, py::arg("t"));

  m.def("log_grid", &log_grid, py::arg("t_min") = 1e-3, py::arg("t_max") = 1.0, py::arg("count") = 40);
  m.def("j_K", &j_K, py::arg("K"), py::arg("t"));
  m.def("fit_power_control", &fit_power_control, py::arg("samples"), py::arg("b") = py::none());
  m.def("log_threshold_T", &log_threshold_T, py::arg("a"), py::arg("eps"));
  m.def("power_from_log", [](double M, double a, double b, double eps) {
    return power_from_log(PowerLogControl{M, a, b}, eps);
  }, py::arg("M"), py::arg("a"), py::arg("b"), py::arg("eps"));

  m.def("run_suite",
        [](const HeatOperator& heat, std::uint64_t seed, int samples, const std::string& suite,
           const std::vector<double>& grid) {
          SuiteOptions options;
          options.seed = seed;
          options.samples = samples;
          options.groups = parse_groups(suite);
          options.t_grid = grid;
          std::optional<SuiteResult> run;
          {
            py::gil_scoped_release release;
            run.emplace(run_suite(heat, options));
          }
          const SuiteResult& result = *run;
          py::dict out;
          out["reports"] = reports(result.reports);
          out["all_passed"] = result.all_passed();
          out["h1"] = cheeger(result.h1);
          out["control"] = to_python(result.control.to_json());
          return out;
        },
        py::arg("heat"), py::arg("seed") = 0, py::arg("samples") = 100, py::arg("suite") = "all",
        py::arg("grid") = log_grid());

  m.def("parse_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
        py::arg("text"), "Parse scenario text and return its canonical form");
  m.def("run_scenario",
        [](const std::string& text) {
          const ScenarioConfig config = parse_config(text);
          std::optional<ScenarioOutcome> outcome;
          {
            py::gil_scoped_release release;
            outcome.emplace(run_scenario(config));
          }
          return py::make_tuple(outcome->exit_code, outcome->files);
        },
        py::arg("text"), "Run a scenario; returns (exit code, written files)");
}
