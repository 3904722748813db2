// Python bindings for the core operations: case parsing, power flow solve,
// benchmark runs and the synthetic grid generator.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>

#include "pflow/bench.hpp"
#include "pflow/caseio.hpp"
#include "pflow/errors.hpp"
#include "pflow/network.hpp"
#include "pflow/solver.hpp"
#include "pflow/synth.hpp"

namespace py = pybind11;
using namespace pflow;

namespace {

SolveOptions make_options(double tol, int max_iter, const std::string& init,
                          const std::string& path) {
    SolveOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    if (init == "flat") opts.init = InitMode::Flat;
    else if (init == "case") opts.init = InitMode::FromCase;
    else throw py::value_error("init must be 'flat' or 'case'");
    if (path == "fused") opts.path = DerivativePath::FusedDirect;
    else if (path == "generic") opts.path = DerivativePath::Generic;
    else throw py::value_error("path must be 'fused' or 'generic'");
    return opts;
}

py::dict result_dict(const ValidatedCase& vc, const PowerFlowResult& res) {
    const double rad2deg = 180.0 / std::numbers::pi;
    py::list buses;
    for (int i = 0; i < vc.n_bus(); ++i) {
        py::dict b;
        b["id"] = vc.bus_ids[i];
        b["vm"] = res.vm[i];
        b["va_deg"] = res.va[i] * rad2deg;
        buses.append(b);
    }
    py::dict timings;
    timings["derivatives"] = res.timings.derivatives_ms;
    timings["jacobian"] = res.timings.jacobian_ms;
    timings["linear_solve"] = res.timings.linear_solve_ms;
    timings["mismatch"] = res.timings.mismatch_ms;
    timings["other"] = res.timings.other_ms;
    const int iters = res.iterations > 0 ? res.iterations : 1;
    py::dict visits;
    visits["derivatives_per_iteration"] = res.derivative_counters.element_visits / iters;
    visits["jacobian_per_iteration"] = res.jacobian_counters.element_visits / iters;

    py::dict out;
    out["converged"] = res.converged;
    out["iterations"] = res.iterations;
    out["max_mismatch"] = res.max_mismatch;
    out["vm"] = res.vm;
    out["va"] = res.va;
    out["buses"] = buses;
    out["timings_ms"] = timings;
    out["visits"] = visits;
    return out;
}

py::dict report_dict(const BenchReport& rep) {
    py::dict d;
    d["case"] = rep.case_name;
    d["path"] = path_name(rep.path);
    d["n_bus"] = rep.n_bus;
    d["nnz"] = rep.nnz_y;
    d["runs"] = rep.runs;
    d["iterations"] = rep.iterations;
    d["min_derivatives_ms"] = rep.min_derivatives_ms;
    d["min_jacobian_ms"] = rep.min_jacobian_ms;
    d["min_linear_solve_ms"] = rep.min_linear_solve_ms;
    d["min_total_ms"] = rep.min_total_ms;
    d["derivative_visits"] = rep.derivative_visits;
    d["jacobian_visits"] = rep.jacobian_visits;
    return d;
}

}  // namespace

PYBIND11_MODULE(pflow, m) {
    m.doc() = "Newton-Raphson power flow with direct CRS Jacobian assembly";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<StructureError>(m, "StructureError", PyExc_ValueError);
    py::register_exception<SingularError>(m, "SingularError", PyExc_ArithmeticError);

    py::enum_<BusType>(m, "BusType")
        .value("PQ", BusType::PQ)
        .value("PV", BusType::PV)
        .value("SLACK", BusType::Slack);

    py::class_<Bus>(m, "Bus")
        .def(py::init<>())
        .def_readwrite("id", &Bus::id)
        .def_readwrite("btype", &Bus::btype)
        .def_readwrite("pd", &Bus::pd)
        .def_readwrite("qd", &Bus::qd)
        .def_readwrite("gs", &Bus::gs)
        .def_readwrite("bs", &Bus::bs)
        .def_readwrite("vm", &Bus::vm)
        .def_readwrite("va", &Bus::va);

    py::class_<Gen>(m, "Gen")
        .def(py::init<>())
        .def_readwrite("bus", &Gen::bus)
        .def_readwrite("pg", &Gen::pg)
        .def_readwrite("qg", &Gen::qg)
        .def_readwrite("vg", &Gen::vg)
        .def_readwrite("in_service", &Gen::in_service);

    py::class_<Branch>(m, "Branch")
        .def(py::init<>())
        .def_readwrite("from_bus", &Branch::from_bus)
        .def_readwrite("to_bus", &Branch::to_bus)
        .def_readwrite("r", &Branch::r)
        .def_readwrite("x", &Branch::x)
        .def_readwrite("b", &Branch::b)
        .def_readwrite("tap", &Branch::tap)
        .def_readwrite("shift", &Branch::shift)
        .def_readwrite("in_service", &Branch::in_service);

    py::class_<Case>(m, "Case")
        .def(py::init<>())
        .def_readwrite("name", &Case::name)
        .def_readwrite("base_mva", &Case::base_mva)
        .def_readwrite("buses", &Case::buses)
        .def_readwrite("gens", &Case::gens)
        .def_readwrite("branches", &Case::branches);

    m.def("parse_matpower_case", [](const std::string& text) {
        return parse_matpower_case(text);
    }, py::arg("text"));
    m.def("parse_json_case", [](const std::string& text) {
        return parse_json_case(text);
    }, py::arg("text"));
    m.def("serialize_case_json", &serialize_case_json, py::arg("case"));
    m.def("load_case_file", &load_case_file, py::arg("path"));

    m.def("ybus", [](const Case& c) {
        const ComplexCRS y = build_ybus(validate_case(c));
        return py::make_tuple(y.n_rows, y.values, y.col_idx, y.row_ptr);
    }, py::arg("case"), "Admittance matrix as (n, values, col_idx, row_ptr)");

    m.def("solve", [](const Case& c, double tol, int max_iter, const std::string& init,
                      const std::string& path) {
        const ValidatedCase vc = validate_case(c);
        return result_dict(vc, newton_raphson(vc, make_options(tol, max_iter, init, path)));
    }, py::arg("case"), py::arg("tol") = 1e-8, py::arg("max_iter") = 10,
       py::arg("init") = "flat", py::arg("path") = "fused");

    m.def("bench", [](const Case& c, int runs, const std::string& path) {
        const ValidatedCase vc = validate_case(c);
        py::list out;
        if (path == "fused" || path == "both")
            out.append(report_dict(
                run_benchmark(vc, c.name, DerivativePath::FusedDirect, runs)));
        if (path == "generic" || path == "both")
            out.append(report_dict(
                run_benchmark(vc, c.name, DerivativePath::Generic, runs)));
        if (py::len(out) == 0) throw py::value_error("path must be fused, generic or both");
        return out;
    }, py::arg("case"), py::arg("runs") = 100, py::arg("path") = "both");

    m.def("synth_grid", &synth_grid, py::arg("n_bus"), py::arg("avg_degree") = 3.0,
          py::arg("pv_fraction") = 0.2, py::arg("seed") = 1);
}
