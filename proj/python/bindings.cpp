#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pqn/calculus.hpp"
#include "pqn/cli.hpp"
#include "pqn/serialize.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

json to_json(const py::dict& d) {
  return json::parse(py::module_::import("json").attr("dumps")(d).cast<std::string>());
}

py::object from_json(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

using Command = int (*)(const pqn::cli::RunConfig&, std::ostream&);

// Runs a CLI command on a config dict; the JSON report gains "exit_code".
py::object run_command(const char* name, Command cmd, const py::dict& config) {
  pqn::cli::RunConfig cfg;
  cfg.command = name;
  pqn::cli::apply_config_json(cfg, to_json(config));
  cfg.format = "json";
  cfg.out.clear();
  std::ostringstream out;
  const int code = cmd(cfg, out);
  py::object result = from_json(out.str());
  result["exit_code"] = code;
  return result;
}

std::string canonical(const pqn::ScalarField& f, const pqn::Chart& c) { return f.to_string(c.namer()); }

}  // namespace

PYBIND11_MODULE(_pqn, m) {
  m.doc() = "Poisson quasi-Nijenhuis exterior calculus";
  m.attr("__version__") = pqn::kToolVersion;

  static py::exception<pqn::Error> error(m, "Error", PyExc_ValueError);
  static py::exception<pqn::HypothesisViolation> violation(m, "HypothesisViolation", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const pqn::HypothesisViolation& e) {
      py::set_error(violation, e.what());
    } catch (const pqn::Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("known_models", &pqn::known_models);

  m.def(
      "check", [](const py::dict& c) { return run_command("check", &pqn::cli::cmd_check, c); }, py::arg("config"),
      "Deform the model's structure and check the PqN/PN axioms. Keys match the CLI config file.");
  m.def(
      "involutivity", [](const py::dict& c) { return run_command("involutivity", &pqn::cli::cmd_involutivity, c); },
      py::arg("config"));
  m.def(
      "deform", [](const py::dict& c) { return run_command("deform", &pqn::cli::cmd_deform, c); }, py::arg("config"));

  m.def(
      "parse_scalar",
      [](const std::string& text, int n) {
        const pqn::Chart c(n);
        return canonical(pqn::parse_scalar(text, c), c);
      },
      py::arg("text"), py::arg("n"), "Canonical prefix form of an expression on the chart with n particles.");
  m.def(
      "evaluate",
      [](const std::string& text, int n, const std::vector<double>& point) {
        const pqn::Chart c(n);
        if (point.size() != static_cast<std::size_t>(c.dim())) throw pqn::DomainError("point must have 2n entries");
        return pqn::parse_scalar(text, c).evaluate(point);
      },
      py::arg("text"), py::arg("n"), py::arg("point"));
  m.def(
      "partial",
      [](const std::string& text, int n, const std::string& coord) {
        const pqn::Chart c(n);
        const auto i = c.resolve(coord);
        if (!i) throw pqn::DomainError("unknown coordinate " + coord);
        return canonical(pqn::parse_scalar(text, c).partial(*i), c);
      },
      py::arg("text"), py::arg("n"), py::arg("coordinate"));
  m.def(
      "poisson_bracket",
      [](const std::string& f, const std::string& g, int n) {
        const pqn::Chart c(n);
        return canonical(
            pqn::poisson_bracket(pqn::canonical_bivector(c), pqn::parse_scalar(f, c), pqn::parse_scalar(g, c)), c);
      },
      py::arg("f"), py::arg("g"), py::arg("n"), "Canonical bracket, {p1, q1} = 1.");
  m.def(
      "trace_invariants",
      [](const std::string& model, int n, int kmax, const std::vector<std::string>& f) {
        std::vector<pqn::Rational> fr;
        for (const auto& s : f) fr.push_back(pqn::cli::parse_rational(s));
        const pqn::ModelBundle b = pqn::make_model(model, n, fr);
        std::vector<std::string> out;
        for (const auto& h : pqn::trace_invariants(b.n, kmax)) out.push_back(canonical(h, b.chart));
        return out;
      },
      py::arg("model"), py::arg("n"), py::arg("kmax"), py::arg("f") = std::vector<std::string>{});
}
