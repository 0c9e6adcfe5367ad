#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <tuple>
#include <vector>

#include "entperc/disorder.hpp"
#include "entperc/dynamics.hpp"
#include "entperc/errors.hpp"
#include "entperc/experiment.hpp"
#include "entperc/mean_field.hpp"

namespace py = pybind11;
namespace ex = entperc::experiment;

namespace {

using TableTuple = std::tuple<std::string, std::vector<std::string>, std::vector<std::vector<double>>>;

std::vector<TableTuple> execute_json(const std::string& config) {
  const ex::Json raw = ex::Json::parse(config, nullptr, false);
  if (raw.is_discarded()) throw entperc::ConfigError("config is not valid JSON");
  const ex::Json resolved = ex::resolve_config(raw);
  std::vector<ex::Table> tables;
  {
    py::gil_scoped_release release;
    tables = ex::execute(resolved);
  }
  std::vector<TableTuple> out;
  for (auto& t : tables) out.emplace_back(t.name, t.columns, std::move(t.rows));
  return out;
}

std::string resolve_json(const std::string& config) {
  const ex::Json raw = ex::Json::parse(config, nullptr, false);
  if (raw.is_discarded()) throw entperc::ConfigError("config is not valid JSON");
  return ex::resolve_config(raw).dump();
}

std::string preset_json(const std::string& name, bool full) { return ex::preset(name, full).dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dynamical entanglement percolation engine.";

  auto config_error = py::register_exception<entperc::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<entperc::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<entperc::BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<entperc::ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  (void)config_error;

  m.attr("__version__") = std::string(ex::kToolVersion);

  m.def("execute_json", &execute_json, py::arg("config"),
        "Run a JSON config and return (name, columns, rows) for every output table.");
  m.def("resolve_json", &resolve_json, py::arg("config"), "Validate a JSON config and return it with defaults filled in.");
  m.def("preset_json", &preset_json, py::arg("name"), py::arg("full") = false);
  m.def("preset_names", &ex::preset_names);

  m.def("conversion_probability", &entperc::conversion_probability, py::arg("omega"), py::arg("t"));
  m.def("p_bernoulli", &entperc::p_bernoulli, py::arg("t"), py::arg("eta"), py::arg("omega1"), py::arg("omega2"));
  m.def("p_gaussian", &entperc::p_gaussian, py::arg("t"), py::arg("mean"), py::arg("stddev"),
        py::arg("k_max") = entperc::kDefaultSeriesTerms);
  m.def("p_asymptotic_gaussian", &entperc::p_asymptotic_gaussian, py::arg("t"), py::arg("mean"), py::arg("stddev"));
  m.def("bernoulli_period", &entperc::bernoulli_period, py::arg("omega1"), py::arg("omega2"));

  m.def("rice_pdf", &entperc::rice_pdf, py::arg("x"), py::arg("nu"), py::arg("sigma"));
  m.def("rice_cdf", &entperc::rice_cdf, py::arg("x"), py::arg("nu"), py::arg("sigma"));
  m.def(
      "eta", [](double sigma, double lambda) { return entperc::eta(sigma, lambda, entperc::EtaMethod::quadrature).value; },
      py::arg("sigma"), py::arg("lambda_"));
  m.def("pearson", &entperc::pearson, py::arg("eta"), py::arg("beta"));

  m.def(
      "solve_fixed_point",
      [](double phi1, double phi2, double tol, std::int64_t max_iter) {
        const auto s = entperc::solve_fixed_point(phi1, phi2, tol, max_iter);
        py::dict d;
        d["phi1"] = s.phi1;
        d["phi2"] = s.phi2;
        d["m1"] = s.m1;
        d["m2"] = s.m2;
        d["S"] = s.S;
        d["iterations"] = s.iterations;
        d["converged"] = s.converged;
        return d;
      },
      py::arg("phi1"), py::arg("phi2"), py::arg("tol") = entperc::kMeanFieldTolerance,
      py::arg("max_iter") = entperc::kMeanFieldMaxIter);
  m.def("jacobian_eigenvalue", &entperc::jacobian_eigenvalue, py::arg("phi1"), py::arg("phi2"));
  m.def("critical_line_phi2", &entperc::critical_line_phi2, py::arg("phi1"));
  m.def(
      "uniform_reshuffled",
      [](double p, double tol) {
        const auto s = entperc::uniform_reshuffled(p, tol);
        return std::make_tuple(s.m, s.P);
      },
      py::arg("p"), py::arg("tol") = entperc::kMeanFieldTolerance);
}
