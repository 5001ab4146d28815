#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include "dissiped/csv.hpp"
#include "dissiped/serialize.hpp"
#include "dissiped/validate.hpp"

namespace py = pybind11;
using namespace dissiped;

namespace {

Mat mat_from_lists(const std::vector<std::vector<double>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r ? static_cast<int>(rows.front().size()) : 0;
  std::vector<double> entries;
  entries.reserve(static_cast<size_t>(r) * c);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c)
      throw std::invalid_argument("matrix rows must have equal length");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return Mat::from(r, c, std::move(entries));
}

std::vector<std::vector<double>> mat_to_lists(const Mat& m) {
  std::vector<std::vector<double>> rows(static_cast<size_t>(m.rows));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) rows[static_cast<size_t>(i)].push_back(m(i, j));
  return rows;
}

py::object json_to_py(const nlohmann::json& j) {
  const py::object loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

GainPolicy gain_from_args(const ScenarioBundle& b, std::optional<double> alpha, bool adaptive) {
  if (adaptive) return GainPolicy::adaptive(b.lyapunov);
  if (!alpha) throw std::invalid_argument("pass alpha=... or adaptive=True");
  return GainPolicy::constant(*alpha);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "observer-based output-feedback stabilization for dissipative state-affine systems";

  py::register_exception<SingularMatrix>(m, "SingularMatrixError");
  py::register_exception<NoConvergence>(m, "NoConvergenceError");
  py::register_exception<DimensionMismatch>(m, "DimensionMismatchError");
  py::register_exception<NonFiniteState>(m, "NonFiniteStateError");
  py::register_exception<NotStrictLyapunov>(m, "NotStrictLyapunovError");
  py::register_exception<DetectabilityViolated>(m, "DetectabilityViolatedError");
  py::register_exception<UnknownMetric>(m, "UnknownMetricError");

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init([](double t_final, double step, int record_every) {
             SimConfig c{t_final, step, record_every};
             c.validate();
             return c;
           }),
           py::arg("t_final"), py::arg("step"), py::arg("record_every") = 1)
      .def_readonly("t_final", &SimConfig::t_final)
      .def_readonly("step", &SimConfig::h)
      .def_readonly("record_every", &SimConfig::record_every);

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("times", [](const Trajectory& t) { return t.times; })
      .def_property_readonly("states",
                             [](const Trajectory& t) {
                               std::vector<std::vector<double>> out;
                               for (const ColVec& s : t.states) out.push_back(s.v);
                               return out;
                             })
      .def_property_readonly("inputs",
                             [](const Trajectory& t) {
                               std::vector<std::vector<double>> out;
                               for (const ColVec& s : t.inputs) out.push_back(s.v);
                               return out;
                             })
      .def_property_readonly("outputs",
                             [](const Trajectory& t) {
                               std::vector<std::vector<double>> out;
                               for (const ColVec& s : t.outputs) out.push_back(s.v);
                               return out;
                             })
      .def_property_readonly("v_series", [](const Trajectory& t) { return t.v_series; })
      .def_property_readonly("err_series", [](const Trajectory& t) { return t.err_series; })
      .def_property_readonly("gain_series", [](const Trajectory& t) { return t.gain_series; })
      .def("__len__", [](const Trajectory& t) { return t.size(); });

  py::class_<ScenarioBundle>(m, "ScenarioBundle")
      .def_readonly("name", &ScenarioBundle::name)
      .def_readonly("default_alphas", &ScenarioBundle::default_alphas)
      .def_property_readonly("x_star",
                             [](const ScenarioBundle& b) { return b.equilibrium.x_star.v; })
      .def_property_readonly("u_star",
                             [](const ScenarioBundle& b) { return b.equilibrium.u_star.v; })
      .def_property_readonly("z0", [](const ScenarioBundle& b) { return b.z0.v; })
      .def_readonly("output_state", &ScenarioBundle::output_state)
      .def_readonly("output_scale", &ScenarioBundle::output_scale)
      .def_readonly("output_label", &ScenarioBundle::output_label)
      .def("to_json", [](const ScenarioBundle& b) { return to_json(b).dump(2); });

  m.def("scenario_names", &scenario_names);
  m.def("build_scenario", &build_scenario, py::arg("name"));
  m.def("build_harmonic_oscillator", &build_harmonic_oscillator);
  m.def("build_cuk", [] { return build_cuk(); });
  m.def(
      "build_heat_exchanger",
      [](std::optional<double> u_star) {
        HeatExchangerParams p;
        if (u_star) p.u_star = *u_star;
        return build_heat_exchanger(p);
      },
      py::arg("u_star") = std::nullopt);

  m.def(
      "analyze",
      [](const ScenarioBundle& b, bool with_alpha0, std::uint64_t seed) {
        AnalyzeOptions opt;
        opt.with_alpha0 = with_alpha0;
        opt.seed = seed;
        return json_to_py(to_json(analyze_bundle(b, opt)));
      },
      py::arg("bundle"), py::arg("with_alpha0") = false, py::arg("seed") = 0,
      "run the assumption checks; returns the report as a dict");

  m.def(
      "simulate",
      [](const ScenarioBundle& b, std::optional<double> alpha, bool adaptive,
         std::optional<double> t_final, std::optional<double> step,
         std::optional<int> record_every) {
        SimConfig cfg = b.default_sim;
        if (t_final) cfg.t_final = *t_final;
        if (step) cfg.h = *step;
        if (record_every) cfg.record_every = *record_every;
        return integrate(b.closed_loop(gain_from_args(b, alpha, adaptive)), b.z0, cfg);
      },
      py::arg("bundle"), py::arg("alpha") = std::nullopt, py::arg("adaptive") = false,
      py::arg("t_final") = std::nullopt, py::arg("step") = std::nullopt,
      py::arg("record_every") = std::nullopt,
      "integrate the closed loop; returns the recorded trajectory");

  m.def("extract_metric",
        [](const Trajectory& t, const std::string& name) { return extract_metric(t, name); },
        py::arg("trajectory"), py::arg("metric"));

  m.def("write_trajectory_csv",
        [](const std::string& path, const Trajectory& t) { write_trajectory_csv(path, t); },
        py::arg("path"), py::arg("trajectory"));

  m.def(
      "eigenvalues",
      [](const std::vector<std::vector<double>>& a) { return eigenvalues(mat_from_lists(a)); },
      py::arg("matrix"));
  m.def(
      "solve_linear",
      [](const std::vector<std::vector<double>>& a, const std::vector<double>& b) {
        return solve_linear(mat_from_lists(a), ColVec::from(std::vector<double>(b))).v;
      },
      py::arg("matrix"), py::arg("rhs"));
  m.def(
      "spectral_norm",
      [](const std::vector<std::vector<double>>& a) { return spectral_norm(mat_from_lists(a)); },
      py::arg("matrix"));
  m.def(
      "observability_matrix",
      [](const std::vector<std::vector<double>>& c, const std::vector<std::vector<double>>& a) {
        return mat_to_lists(observability_matrix(mat_from_lists(c), mat_from_lists(a)));
      },
      py::arg("C"), py::arg("A"));

  m.def(
      "adaptive_gain",
      [](const std::vector<std::vector<double>>& Q, double scale,
         const std::vector<double>& xhat, const std::vector<double>& y_err,
         const std::vector<std::vector<double>>& C, const std::vector<std::vector<double>>& P) {
        const LyapunovSpec W{mat_from_lists(Q), scale};
        return adaptive_gain(W, ColVec::from(std::vector<double>(xhat)),
                             ColVec::from(std::vector<double>(y_err)), mat_from_lists(C),
                             mat_from_lists(P));
      },
      py::arg("Q"), py::arg("scale"), py::arg("xhat"), py::arg("y_err"), py::arg("C"),
      py::arg("P"));

  m.def(
      "run_acceptance",
      [](const std::string& filter) {
        py::list out;
        for (const CheckResult& r : run_acceptance(filter)) {
          py::dict d;
          d["id"] = r.id;
          d["name"] = r.name;
          d["pass"] = r.pass;
          d["detail"] = r.detail;
          out.append(std::move(d));
        }
        return out;
      },
      py::arg("filter") = "", "run the acceptance checks; returns a list of dicts");

  m.attr("__version__") = "0.1.0";
}
