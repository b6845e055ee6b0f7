#include <sstream>
#include <string>

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "su11/errors.hpp"
#include "su11/fock.hpp"
#include "su11/limits.hpp"
#include "su11/qfi.hpp"
#include "su11/sensitivity.hpp"
#include "su11/sweep.hpp"
#include "su11/verify.hpp"

namespace py = pybind11;
using namespace su11;

namespace {

py::dict row_dict(const Row& r) {
  py::dict d;
  d["series"] = r.series;
  d["axis"] = r.axis;
  d["x"] = r.x;
  d["m"] = r.m;
  d["quantity"] = std::string(to_string(r.quantity));
  d["value"] = r.value ? py::cast(*r.value) : py::none();
  d["error"] = r.error;
  return d;
}

py::list table_list(const Table& t) {
  py::list out;
  for (const auto& r : t) out.append(row_dict(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Photon-subtracted SU(1,1) interferometer: sensitivity, QFI, limits, Fock oracle";

  static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
  static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const NumericalError& e) {
      py::object exc = py::reinterpret_borrow<py::object>(numerical)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      py::set_error(numerical, exc);
    }
  });

  py::class_<Params>(m, "Params")
      .def(py::init([](double g, double beta, double phi, int m_, double T1, double T2,
                       double eta, double alpha, int nu) {
             Params p{g, beta, phi, m_, T1, T2, eta, alpha, nu};
             p.validate();
             return p;
           }),
           py::arg("g") = 1.0, py::arg("beta") = 1.0, py::arg("phi") = 0.4, py::arg("m") = 0,
           py::arg("T1") = 1.0, py::arg("T2") = 1.0, py::arg("eta") = 1.0,
           py::arg("alpha") = 0.0, py::arg("nu") = 1)
      .def_readwrite("g", &Params::g)
      .def_readwrite("beta", &Params::beta)
      .def_readwrite("phi", &Params::phi)
      .def_readwrite("m", &Params::m)
      .def_readwrite("T1", &Params::T1)
      .def_readwrite("T2", &Params::T2)
      .def_readwrite("eta", &Params::eta)
      .def_readwrite("alpha", &Params::alpha)
      .def_readwrite("nu", &Params::nu)
      .def("validate", &Params::validate)
      .def(py::self == py::self)
      .def("__repr__", [](const Params& p) {
        std::ostringstream s;
        s << "Params(g=" << p.g << ", beta=" << p.beta << ", phi=" << p.phi << ", m=" << p.m
          << ", T1=" << p.T1 << ", T2=" << p.T2 << ", eta=" << p.eta << ", alpha=" << p.alpha
          << ", nu=" << p.nu << ")";
        return s.str();
      });

  py::class_<SensitivityReport>(m, "SensitivityReport")
      .def_readonly("delta_phi", &SensitivityReport::delta_phi)
      .def_readonly("mean_N", &SensitivityReport::mean_N)
      .def_readonly("mean_N2", &SensitivityReport::mean_N2)
      .def_readonly("norm", &SensitivityReport::norm)
      .def_readonly("d_mean_dphi", &SensitivityReport::d_mean_dphi);

  py::class_<QfiReport>(m, "QfiReport")
      .def_readonly("F", &QfiReport::F)
      .def_readonly("qcrb", &QfiReport::qcrb)
      .def_readonly("alpha_star", &QfiReport::alpha_star)
      .def_readonly("F_closed", &QfiReport::F_closed)
      .def_readonly("F_numeric", &QfiReport::F_numeric)
      .def_readonly("consistent", &QfiReport::consistent);

  py::class_<LimitsReport>(m, "LimitsReport")
      .def_readonly("N_T", &LimitsReport::N_T)
      .def_readonly("sql", &LimitsReport::sql)
      .def_readonly("hl", &LimitsReport::hl);

  py::class_<PhaseOptimum>(m, "PhaseOptimum")
      .def_readonly("phi", &PhaseOptimum::phi)
      .def_readonly("delta_phi", &PhaseOptimum::delta_phi);

  m.def("sensitivity_ideal", &sensitivity_ideal, py::arg("p"));
  m.def("sensitivity_lossy", &sensitivity_lossy, py::arg("p"));
  m.def("optimal_phase", &optimal_phase, py::arg("p"), py::arg("phi_lo"), py::arg("phi_hi"),
        py::arg("lossy") = false, py::arg("samples") = 64);
  m.def("qfi_ideal", &qfi_ideal, py::arg("p"));
  m.def("qfi_lossy", &qfi_lossy, py::arg("p"));
  m.def("qcrb", &qcrb, py::arg("F"), py::arg("nu") = 1);
  m.def("internal_photon_number", &internal_photon_number, py::arg("p"));
  m.def("limits", &limits, py::arg("p"));

  m.def(
      "oracle_sensitivity",
      [](const Params& p, const std::string& mode) {
        if (mode != "a" && mode != "b") throw ValidationError("mode must be 'a' or 'b'");
        const auto r = numeric_sensitivity(p, mode == "a" ? Mode::a : Mode::b);
        return py::make_tuple(r.delta_phi, r.n_cut);
      },
      py::arg("p"), py::arg("mode") = "a",
      "Brute-force Fock-space sensitivity; returns (delta_phi, n_cut).");
  m.def(
      "oracle_qfi",
      [](const Params& p) {
        const auto r = numeric_qfi_pure(p);
        return py::make_tuple(r.value, r.n_cut);
      },
      py::arg("p"));

  m.def("parse_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
        py::arg("text"), "Parses and re-serializes a sweep config (canonical form).");
  m.def(
      "run_config",
      [](const std::string& text, int threads) {
        const auto specs = parse_config(text);
        Table t;
        {
          py::gil_scoped_release release;
          t = run_sweeps(specs, threads);
        }
        return table_list(t);
      },
      py::arg("text"), py::arg("threads") = 0);
  m.def(
      "run_figure",
      [](const std::string& id, int threads) {
        Table t;
        {
          py::gil_scoped_release release;
          t = run_figure(id, threads);
        }
        return table_list(t);
      },
      py::arg("id"), py::arg("threads") = 0);
  m.def("figure_ids", &figure_ids);
  m.def(
      "csv",
      [](const std::string& text, int threads) {
        std::ostringstream out;
        write_csv(out, run_sweeps(parse_config(text), threads));
        return out.str();
      },
      py::arg("text"), py::arg("threads") = 0);

  m.def(
      "verify",
      [](const std::string& level, std::vector<int> only) {
        if (level != "fast" && level != "full") throw ValidationError("level must be fast or full");
        VerifyOptions opt;
        opt.level = level == "fast" ? VerifyLevel::fast : VerifyLevel::full;
        opt.only = std::move(only);
        std::vector<CriterionResult> results;
        {
          py::gil_scoped_release release;
          results = run_verify(opt);
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["id"] = r.id;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["measured"] = r.measured;
          d["tolerance"] = r.tolerance;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("level") = "fast", py::arg("only") = std::vector<int>{});
}
