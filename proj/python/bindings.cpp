#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "mcfi/commands.hpp"
#include "mcfi/csv.hpp"
#include "mcfi/optimize.hpp"
#include "mcfi/verify.hpp"

namespace py = pybind11;
using namespace mcfi;

namespace {

/// Configuration plus the inversion problem it describes.
struct PyProblem {
  RunConfig config;
  InversionProblem problem;
  std::optional<DesignVector> target_design;
};

PyProblem build_problem(const RunConfig& config) {
  ResolvedTargets t = resolve_targets(config);
  return {config, make_problem(config, t.targets), t.design};
}

py::dict history_dict(const OptimizeHistory& h) {
  std::vector<int> iter;
  std::vector<double> f, pg, step;
  Matrix x(h.records.empty() ? 0 : h.records.front().x.size(), h.records.size());
  for (std::size_t k = 0; k < h.records.size(); ++k) {
    const auto& r = h.records[k];
    iter.push_back(r.iteration);
    f.push_back(r.f);
    pg.push_back(r.grad_inf_norm);
    step.push_back(r.step);
    x.col(static_cast<Eigen::Index>(k)) = r.x;
  }
  py::dict d;
  d["iter"] = iter;
  d["f"] = f;
  d["grad_inf_norm"] = pg;
  d["step"] = step;
  d["x"] = Matrix(x.transpose());
  d["termination"] = to_string(h.reason);
  d["converged"] = h.converged();
  d["message"] = h.message;
  d["warnings"] = h.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Modal-centric field inversion for Burgers flows";
  m.attr("__version__") = MCFI_VERSION;

  // Registered base first: translators are tried most recent first.
  auto& base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  m.def("parse_key_values", &parse_key_values, py::arg("text"));
  m.def("config_hash", &config_hash, py::arg("values"));

  py::class_<RunConfig>(m, "Config")
      .def_static(
          "load", [](const std::filesystem::path& p, const KeyValues& o) { return load_run_config(p, o); },
          py::arg("path"), py::arg("overrides") = KeyValues{})
      .def_static(
          "from_text",
          [](const std::string& text, const std::filesystem::path& base) {
            return make_run_config(parse_key_values(text), base);
          },
          py::arg("text"), py::arg("base_dir") = std::filesystem::path{})
      .def_property_readonly("scenario", [](const RunConfig& c) { return to_string(c.scenario); })
      .def_property_readonly("hash", [](const RunConfig& c) { return c.hash; })
      .def_property_readonly("design_size", &RunConfig::design_size)
      .def_property_readonly("initial_design", [](const RunConfig& c) { return c.initial_design; })
      .def_property_readonly("lower", [](const RunConfig& c) { return Vector(c.design().lower()); })
      .def_property_readonly("upper", [](const RunConfig& c) { return Vector(c.design().upper()); })
      .def_property_readonly("output_dir", [](const RunConfig& c) { return c.output_dir; })
      .def_property_readonly("shape", [](const RunConfig& c) {
        const Grid g = c.grid();
        return py::make_tuple(g.ny(), g.nx());
      });

  m.def("initial_condition", [](const RunConfig& c) { return StateVector(c.initial_condition()); },
        py::arg("config"), "Initial state; in 2D the u block precedes the v block.");

  m.def(
      "simulate",
      [](const RunConfig& c, std::optional<DesignVector> x) {
        const DesignVector design = x ? *x : c.initial_design;
        Trajectory t;
        {
          py::gil_scoped_release release;
          t = simulate(c.design(), design, c.grid(), c.solver, c.initial_condition());
        }
        py::dict d;
        d["snapshots"] = Matrix(t.snapshots);
        d["dt"] = t.dt;
        d["initial_state"] = StateVector(t.initial_state);
        return d;
      },
      py::arg("config"), py::arg("x") = py::none(),
      "Forward run; snapshots has one column per time step.");

  py::class_<PyProblem>(m, "Problem")
      .def(py::init(&build_problem), py::arg("config"))
      .def_property_readonly("config", [](const PyProblem& p) { return p.config; })
      .def_property_readonly("target_design", [](const PyProblem& p) { return p.target_design; })
      .def(
          "objective",
          [](const PyProblem& p, const DesignVector& x) {
            py::gil_scoped_release release;
            return p.problem.objective(x);
          },
          py::arg("x"))
      .def(
          "value_and_gradient",
          [](const PyProblem& p, const DesignVector& x) {
            py::gil_scoped_release release;
            const ForwardSolution s = p.problem.solve(x);
            return std::make_pair(s.objective, DesignVector(p.problem.gradient(s)));
          },
          py::arg("x"))
      .def(
          "grad_check",
          [](const PyProblem& p, std::optional<DesignVector> x, double h, const std::vector<int>& components) {
            GradCheckReport r;
            {
              py::gil_scoped_release release;
              r = grad_check(p.problem, x ? *x : p.config.initial_design, h, components);
            }
            py::list rows;
            for (const auto& row : r.rows) {
              py::dict d;
              d["component"] = row.component;
              d["label"] = row.label;
              d["adjoint"] = row.adjoint;
              d["fd"] = row.fd;
              d["abs_diff"] = row.abs_diff;
              d["rel_err"] = row.rel_err;
              d["valid"] = row.valid;
              rows.append(d);
            }
            return py::make_tuple(rows, r.max_rel_err());
          },
          py::arg("x") = py::none(), py::arg("h") = kDefaultFdStep, py::arg("components") = std::vector<int>{},
          "Adjoint versus forward differences; returns (rows, max_rel_err).")
      .def(
          "minimize",
          [](const PyProblem& p, std::optional<DesignVector> x0) {
            OptimizeResult r;
            {
              py::gil_scoped_release release;
              r = minimize(p.problem, x0 ? *x0 : p.config.initial_design, p.config.optimize);
            }
            py::dict d;
            d["x"] = r.x;
            d["f"] = r.f;
            d["history"] = history_dict(r.history);
            return d;
          },
          py::arg("x0") = py::none());

  m.def(
      "run",
      [](const std::string& command, const RunConfig& c) {
        std::ostringstream log, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_command(command, c, log, err);
        }
        return py::make_tuple(code, log.str(), err.str());
      },
      py::arg("command"), py::arg("config"),
      "Runs a command-line command; returns (exit_code, log, errors).");
}
