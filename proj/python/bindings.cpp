#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "covsep/cmc.hpp"
#include "covsep/commands.hpp"
#include "covsep/covariance.hpp"
#include "covsep/errors.hpp"
#include "covsep/filter_normal_form.hpp"
#include "covsep/lur.hpp"
#include "covsep/schmidt.hpp"
#include "covsep/state_io.hpp"
#include "covsep/state_zoo.hpp"

namespace py = pybind11;
using namespace covsep;

PYBIND11_MODULE(_covsep, m) {
  m.doc() = "Covariance-matrix entanglement criteria";

  auto base = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<SingularReducedState>(m, "SingularReducedState", base.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
  py::register_exception<NoThreshold>(m, "NoThreshold", base.ptr());
  py::register_exception<AmbiguousThreshold>(m, "AmbiguousThreshold", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<int, int, CMatrix, double>(), py::arg("dim_a"), py::arg("dim_b"),
           py::arg("matrix"), py::arg("tol") = 1e-10)
      .def_property_readonly("dim_a", &DensityMatrix::dim_a)
      .def_property_readonly("dim_b", &DensityMatrix::dim_b)
      .def_property_readonly("matrix", &DensityMatrix::matrix)
      .def("__repr__", [](const DensityMatrix& r) {
        return "<DensityMatrix " + std::to_string(r.dim_a()) + "x" + std::to_string(r.dim_b()) +
               ">";
      });

  py::class_<CriterionVerdict>(m, "CriterionVerdict")
      .def_readonly("criterion", &CriterionVerdict::criterion)
      .def_readonly("left", &CriterionVerdict::left)
      .def_readonly("right", &CriterionVerdict::right)
      .def_readonly("margin", &CriterionVerdict::margin)
      .def_readonly("detected", &CriterionVerdict::detected)
      .def_readonly("details", &CriterionVerdict::details)
      .def("__repr__", [](const CriterionVerdict& v) {
        return "<CriterionVerdict " + v.criterion + (v.detected ? " detected" : " not detected") +
               ">";
      });

  py::class_<FilterNormalFormResult>(m, "FilterNormalForm")
      .def_readonly("state", &FilterNormalFormResult::state)
      .def_readonly("filter_a", &FilterNormalFormResult::filter_a)
      .def_readonly("filter_b", &FilterNormalFormResult::filter_b)
      .def_readonly("xi", &FilterNormalFormResult::xi)
      .def_readonly("iterations", &FilterNormalFormResult::iterations)
      .def_readonly("residual", &FilterNormalFormResult::residual);

  py::class_<OperatorSchmidtDecomposition>(m, "OperatorSchmidtDecomposition")
      .def_readonly("coefficients", &OperatorSchmidtDecomposition::coefficients)
      .def_readonly("ops_a", &OperatorSchmidtDecomposition::ops_a)
      .def_readonly("ops_b", &OperatorSchmidtDecomposition::ops_b)
      .def_readonly("traces_a", &OperatorSchmidtDecomposition::traces_a)
      .def_readonly("traces_b", &OperatorSchmidtDecomposition::traces_b)
      .def("reconstruct", &OperatorSchmidtDecomposition::reconstruct);

  py::class_<QubitCmcResult>(m, "QubitCmcResult")
      .def_readonly("verdict", &QubitCmcResult::verdict)
      .def_readonly("lower_bound", &QubitCmcResult::lower_bound)
      .def_readonly("upper_bound", &QubitCmcResult::upper_bound)
      .def_readonly("dual", &QubitCmcResult::dual)
      .def_readonly("iterations", &QubitCmcResult::iterations);

  py::class_<LocalUncertaintySet>(m, "LocalUncertaintySet")
      .def_readonly("ops_a", &LocalUncertaintySet::ops_a)
      .def_readonly("ops_b", &LocalUncertaintySet::ops_b)
      .def_property_readonly("bound_a", [](const LocalUncertaintySet& l) { return l.bound_a.value; })
      .def_property_readonly("bound_b", [](const LocalUncertaintySet& l) { return l.bound_b.value; })
      .def_property_readonly("certified", &LocalUncertaintySet::certified)
      .def("rhs", &LocalUncertaintySet::rhs);

  // states
  m.def("random_density_matrix",
        py::overload_cast<int, int, int, std::uint64_t>(&random_density_matrix), py::arg("dim_a"),
        py::arg("dim_b"), py::arg("rank"), py::arg("seed"));
  m.def("maximally_entangled", &maximally_entangled, py::arg("d"));
  m.def("maximally_mixed", &maximally_mixed, py::arg("dim_a"), py::arg("dim_b"));
  m.def("werner_state", &werner_state, py::arg("p"));
  m.def("isotropic_state", &isotropic_state, py::arg("p"), py::arg("d"));
  m.def("upb_tiles_state", &upb_tiles_state);
  m.def("upb_noise_state", &upb_noise_state, py::arg("p"));
  m.def("partial_transpose",
        [](const DensityMatrix& r) { return partial_transpose(r.matrix(), r.dim_a(), r.dim_b()); });
  m.def("realign", [](const DensityMatrix& r) { return realign(r.matrix(), r.dim_a(), r.dim_b()); });
  m.def("parse_state", &parse_state);
  m.def("format_state", &format_state);

  // criteria
  m.def("ppt_test", &ppt_test, py::arg("rho"), py::arg("tol") = kDefaultDetectionTol);
  m.def("operator_schmidt", &operator_schmidt, py::arg("rho"));
  m.def("ccnr_test", [](const DensityMatrix& r, double tol) {
    return ccnr_test(operator_schmidt(r), tol);
  }, py::arg("rho"), py::arg("tol") = kDefaultDetectionTol);
  m.def("prop4_test", [](const DensityMatrix& r, double tol) {
    return schmidt_form_test(operator_schmidt(r), tol);
  }, py::arg("rho"), py::arg("tol") = kDefaultDetectionTol);
  m.def("prop3_test", py::overload_cast<const DensityMatrix&, double>(&correlation_trace_test),
        py::arg("rho"), py::arg("tol") = kDefaultDetectionTol);
  m.def("to_fnf", [](const DensityMatrix& r, double tol, int max_iter) {
    FnfOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    return to_fnf(r, o);
  }, py::arg("rho"), py::arg("tol") = 1e-10, py::arg("max_iter") = 500);
  m.def("prop6_test", &fnf_cm_test, py::arg("fnf"), py::arg("tol") = kDefaultDetectionTol);
  m.def("eq8_test", &fnf_asymmetric_test, py::arg("fnf"), py::arg("tol") = kDefaultDetectionTol);
  m.def("dv_test", py::overload_cast<const FilterNormalFormResult&, double>(&dv_test),
        py::arg("fnf"), py::arg("tol") = kDefaultDetectionTol);
  m.def("qubit_cm", py::overload_cast<const DensityMatrix&>(&qubit_cm), py::arg("rho"));
  m.def("qubit_cmc_feasibility", [](const DensityMatrix& r, double tol) {
    FeasibilityOptions o;
    o.tol = tol;
    return qubit_cmc_feasibility(qubit_cm(r), o);
  }, py::arg("rho"), py::arg("tol") = 1e-7);
  m.def("extract_lur_witness", &extract_lur_witness, py::arg("rho"), py::arg("feasibility"));
  m.def("lur_violation", [](const DensityMatrix& r, const LocalUncertaintySet& l) {
    const auto v = lur_value(r, l);
    return py::make_tuple(v.lhs, v.rhs);
  }, py::arg("rho"), py::arg("lur"));

  // bounds
  m.def("asymmetric_fnf_bound", &asymmetric_fnf_bound);
  m.def("ccnr_fnf_bound", &ccnr_fnf_bound);
  m.def("dv_fnf_bound", &dv_fnf_bound);

  // report-level entry point, returns the JSON report text
  m.def("analyze", [](const DensityMatrix& r, const std::string& criteria) {
    const auto list = resolve_criteria(criteria, r.dim_a(), r.dim_b());
    return cmd_analyze(r, "python", list).report.dump();
  }, py::arg("rho"), py::arg("criteria") = "all");
}
