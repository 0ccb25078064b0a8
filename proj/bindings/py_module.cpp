// Python bindings for the main operations: graphs, piecewise maps, exact
// set computation, simulation and the sufficient-condition checker.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nscon/analysis.hpp"
#include "nscon/dynamics.hpp"
#include "nscon/errors.hpp"
#include "nscon/filippov.hpp"
#include "nscon/graph.hpp"
#include "nscon/scenario_io.hpp"

namespace py = pybind11;
using namespace nscon;

namespace {

py::dict report_to_dict(const AnalysisReport& rep) {
  py::dict d;
  d["roots"] = rep.roots;
  d["continuity_set"] = rep.continuity_set;
  d["assumption1_ok"] = rep.assumption1_ok;
  d["assumption2_ok"] = rep.assumption2_ok;
  d["theorem1"] = std::string(to_string(rep.theorem1));
  d["theorem2"] = rep.theorem2;
  d["theorem3"] = rep.theorem3;
  d["theorem4"] = std::string(to_string(rep.theorem4));
  d["theorem5"] = rep.theorem5;
  d["prediction"] = std::string(to_string(rep.prediction));
  if (rep.sliding_eta)
    d["sliding_eta"] = py::make_tuple(rep.sliding_eta->first, rep.sliding_eta->second);
  else
    d["sliding_eta"] = py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(nsconsensus, m) {
  m.doc() = "Consensus protocols with discontinuous couplings: exact Filippov sets, "
            "simulation and sufficient-condition checks";

  py::register_exception<NotStronglyConnected>(m, "NotStronglyConnectedError");
  py::register_exception<BudgetExceeded>(m, "BudgetExceededError");
  py::register_exception<NestedDiscontinuity>(m, "NestedDiscontinuityError");
  py::register_exception<ConfigError>(m, "ConfigurationError");
  py::register_exception<Divergence>(m, "DivergenceError");
  py::register_exception<EdgeFnsPresent>(m, "EdgeFnsPresentError");
  py::register_exception<ParseError>(m, "ScenarioParseError");
  py::register_exception<IoError>(m, "ScenarioIoError");

  py::class_<Digraph>(m, "Digraph")
      .def(py::init<int>(), py::arg("n"))
      .def("add_edge", &Digraph::add_edge, py::arg("src"), py::arg("dst"), py::arg("weight"),
           "Adds the edge src -> dst (0-based).")
      .def("weight", &Digraph::weight, py::arg("i"), py::arg("j"))
      .def_property_readonly("n", &Digraph::size)
      .def("laplacian", [](const Digraph& g) {
        const Mat l = build_laplacian(g);
        std::vector<Vec> rows;
        for (int i = 0; i < l.rows(); ++i) rows.push_back(l.row(i));
        return rows;
      });

  py::class_<GraphFacts>(m, "GraphFacts")
      .def_readonly("roots", &GraphFacts::roots)
      .def_readonly("strongly_connected", &GraphFacts::strongly_connected)
      .def_readonly("weakly_connected", &GraphFacts::weakly_connected)
      .def_readonly("has_spanning_tree", &GraphFacts::has_spanning_tree)
      .def_readonly("balanced", &GraphFacts::balanced)
      .def_readonly("is_undirected", &GraphFacts::is_undirected)
      .def_readonly("perron_left", &GraphFacts::perron_left);

  m.def("compute_facts", &compute_facts);
  m.def("perron_left_vector", &perron_left_vector);

  py::class_<FnPredicates>(m, "FnPredicates")
      .def_readonly("sign_preserving", &FnPredicates::sign_preserving)
      .def_readonly("continuous_at_origin", &FnPredicates::continuous_at_origin)
      .def_readonly("symmetric_jump_at_origin", &FnPredicates::symmetric_jump_at_origin)
      .def_readonly("nondecreasing", &FnPredicates::nondecreasing)
      .def_readonly("left_limit_0", &FnPredicates::left_limit_0)
      .def_readonly("right_limit_0", &FnPredicates::right_limit_0);

  py::class_<PiecewiseScalarFn>(m, "PiecewiseScalarFn")
      .def_static("sign", &PiecewiseScalarFn::sign, py::arg("scale") = 1.0)
      .def_static("sat", &PiecewiseScalarFn::sat, py::arg("lo") = -1.0, py::arg("hi") = 1.0)
      .def_static("identity", &PiecewiseScalarFn::identity, py::arg("slope") = 1.0)
      .def_static("deadzone", &PiecewiseScalarFn::deadzone, py::arg("halfwidth"),
                  py::arg("slope") = 1.0)
      .def_static("log_quantizer", &PiecewiseScalarFn::log_quantizer, py::arg("gain") = 1.0,
                  py::arg("ratio") = 0.5, py::arg("levels") = 3)
      .def_static("jump", &PiecewiseScalarFn::jump, py::arg("neg"), py::arg("pos"))
      .def("__call__", &PiecewiseScalarFn::eval)
      .def("eval", &PiecewiseScalarFn::eval)
      .def("one_sided_limits", &PiecewiseScalarFn::one_sided_limits)
      .def("scalar_filippov",
           [](const PiecewiseScalarFn& f, double y) {
             const Interval iv = f.scalar_filippov(y);
             return py::make_tuple(iv.lo, iv.hi);
           })
      .def("predicates", [](const PiecewiseScalarFn& f) { return check_predicates(f); })
      .def("integral_from_zero", &PiecewiseScalarFn::integral_from_zero);

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("n", &Scenario::size)
      .def_readonly("x0", &Scenario::x0)
      .def_readonly("horizon", &Scenario::horizon)
      .def_readonly("graph", &Scenario::graph);

  m.def("load_scenario", &parse_scenario, py::arg("text"), py::arg("source") = "<string>",
        "Parses a scenario from JSON text.");
  m.def("load_scenario_file", &load_scenario_file, py::arg("path"));
  m.def("serialize_scenario", &serialize_scenario);

  py::class_<FilippovPolytope>(m, "FilippovPolytope")
      .def_readonly("dim", &FilippovPolytope::dim)
      .def_readonly("vertices", &FilippovPolytope::vertices);

  m.def(
      "filippov_at",
      [](const Scenario& s, const Vec& x) {
        const auto structure = LinearArgumentStructure::for_scenario(s);
        return filippov_set(structure, x);
      },
      py::arg("scenario"), py::arg("x"),
      "Exact velocity set of the protocol at a state.");
  m.def("hull_contains", &hull_contains, py::arg("polytope"), py::arg("point"),
        py::arg("tol") = 1e-9);
  m.def("sliding_range", &sliding_range, py::arg("polytope"));

  py::class_<Classification>(m, "Classification")
      .def_property_readonly("kind",
                             [](const Classification& c) { return std::string(to_string(c.kind)); })
      .def_readonly("value", &Classification::value)
      .def_readonly("rate", &Classification::rate);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("states", &Trajectory::states)
      .def_readonly("v_channel", &Trajectory::v_channel)
      .def_readonly("w_channel", &Trajectory::w_channel)
      .def_readonly("diameter", &Trajectory::diameter)
      .def_readonly("sum", &Trajectory::sum)
      .def_readonly("classification", &Trajectory::classification)
      .def("final_diameter", &Trajectory::final_diameter)
      .def("csv", [](const Trajectory& t, int thin) { return trajectory_csv(t, thin); },
           py::arg("thin") = 1);

  py::class_<ErrorTrajectory>(m, "ErrorTrajectory")
      .def_readonly("times", &ErrorTrajectory::times)
      .def_readonly("states", &ErrorTrajectory::states)
      .def_readonly("norm1", &ErrorTrajectory::norm1)
      .def_readonly("v1_channel", &ErrorTrajectory::v1_channel)
      .def_readonly("sigma", &ErrorTrajectory::sigma);

  m.def("simulate", &simulate, py::arg("scenario"));
  m.def("simulate_error", &simulate_error, py::arg("scenario"));
  m.def("analyze", [](const Scenario& s) { return report_to_dict(analyze(s)); },
        py::arg("scenario"));
  m.def(
      "ph_decompose",
      [](const Digraph& g) {
        const auto ph = ph_decompose(g);
        auto to_rows = [](const Mat& m_) {
          std::vector<Vec> rows;
          for (int i = 0; i < m_.rows(); ++i) rows.push_back(m_.row(i));
          return rows;
        };
        py::dict d;
        d["J"] = to_rows(ph.skew);
        d["R"] = to_rows(ph.symmetric);
        d["psd_ok"] = ph.psd_ok;
        d["min_eigenvalue"] = ph.min_eigenvalue;
        return d;
      },
      py::arg("graph"));
}
