#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "mdtube/acceptance.hpp"
#include "mdtube/analytic_reference.hpp"
#include "mdtube/config.hpp"
#include "mdtube/errors.hpp"
#include "mdtube/output.hpp"
#include "mdtube/reconstruction.hpp"
#include "mdtube/scenarios.hpp"

namespace py = pybind11;
using namespace mdtube;

namespace {

py::dict error_row(const ErrorRow& r) {
    py::dict d;
    d["study"] = r.study;
    d["k"] = r.k;
    d["r_max"] = r.r_max;
    d["rho_factor"] = r.rho_factor;
    d["delta"] = r.delta_correction;
    d["level"] = r.level;
    d["cells"] = r.cells;
    d["h"] = r.h;
    d["E"] = r.e;
    d["E_tilde"] = r.e_tilde;
    d["order"] = r.order;
    d["order_tilde"] = r.order_tilde;
    d["iterations"] = r.iterations;
    d["iterations_tilde"] = r.iterations_tilde;
    return d;
}

py::dict transpiration_row(const TranspirationRow& r) {
    py::dict d;
    d["collar_pressure"] = r.collar_pressure;
    d["grid"] = r.grid;
    d["cells"] = r.cells;
    d["r_t"] = r.r_t;
    d["collar_flux"] = r.collar_flux;
    d["relative_mismatch"] = r.relative_mismatch;
    d["iterations"] = r.iterations;
    d["damped_steps"] = r.damped_steps;
    d["min_interface_pressure"] = r.min_interface_pressure;
    d["interface_violations"] = r.interface_violations;
    return d;
}

py::dict segment_row(const SegmentRow& r) {
    py::dict d;
    d["collar_pressure"] = r.collar_pressure;
    d["grid"] = r.grid;
    d["cell"] = r.cell;
    d["segment"] = r.segment;
    d["s"] = r.s;
    d["depth"] = r.depth;
    d["radius"] = r.radius;
    d["u_e"] = r.u_e;
    d["u_hat"] = r.u_hat;
    d["q"] = r.q;
    return d;
}

ScenarioKind kind_from(const std::string& name) {
    return parse_config_string("[scenario]\nkind = " + name + "\n").kind;
}

}  // namespace

PYBIND11_MODULE(_mdtube, m) {
    m.doc() = "Mixed-dimensional tube/bulk diffusion solver";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

    py::class_<DiffusionLaw>(m, "DiffusionLaw")
        .def_static("constant", &DiffusionLaw::constant, py::arg("d0"))
        .def_static("exponential", &DiffusionLaw::exponential, py::arg("d0"), py::arg("k"),
                    py::arg("d_min") = 1e-6)
        .def_static(
            "van_genuchten_mualem",
            [](double permeability, double viscosity, double theta_r, double theta_s, double alpha, double n,
               double lambda, double p_ref) {
                VanGenuchtenMualemLaw p;
                p.permeability = permeability;
                p.viscosity = viscosity;
                p.theta_r = theta_r;
                p.theta_s = theta_s;
                p.alpha = alpha;
                p.n = n;
                p.lambda = lambda;
                p.p_ref = p_ref;
                return DiffusionLaw::van_genuchten_mualem(p);
            },
            py::arg("permeability") = 5.89912e-13, py::arg("viscosity") = 1e-3, py::arg("theta_r") = 0.08,
            py::arg("theta_s") = 0.43, py::arg("alpha") = 4.077e-4, py::arg("n") = 1.6, py::arg("lambda_") = 0.5,
            py::arg("p_ref") = 1e5)
        .def_static("tabulated", &DiffusionLaw::tabulated, py::arg("u"), py::arg("d"))
        .def_property_readonly("name", &DiffusionLaw::name)
        .def("__call__", &DiffusionLaw::eval, py::arg("u"))
        .def("derivative", &DiffusionLaw::derivative, py::arg("u"))
        .def("transform", &DiffusionLaw::transform, py::arg("u"))
        .def("inverse_transform", &DiffusionLaw::inverse_transform, py::arg("psi"))
        .def("with_table", &DiffusionLaw::with_table, py::arg("u_lo"), py::arg("u_hi"), py::arg("samples"))
        .def("__repr__", [](const DiffusionLaw& l) { return "<DiffusionLaw " + l.name() + ">"; });

    m.def("kernel_profile_f", &kernel_profile_f, py::arg("d"), py::arg("radius"), py::arg("rho"));
    m.def(
        "reconstruct_interface",
        [](double u_b_delta, double u_e, double radius, double rho, double delta, double gamma,
           const DiffusionLaw& law) {
            const auto r = reconstruct_interface({u_b_delta, u_e, radius, rho, delta, gamma}, law);
            py::dict d;
            d["u_hat"] = r.u_hat;
            d["q"] = r.q;
            d["dq_du_b"] = r.dq_du_b;
            d["dq_du_e"] = r.dq_du_e;
            d["iterations"] = r.iterations;
            d["uniqueness_warning"] = r.uniqueness_warning;
            return d;
        },
        py::arg("u_b_delta"), py::arg("u_e"), py::arg("radius"), py::arg("rho"), py::arg("delta"),
        py::arg("gamma"), py::arg("law"));

    py::class_<SingleTubeSolution>(m, "SingleTubeSolution")
        .def(py::init([](const DiffusionLaw& law, double radius, double rho, double u_hat, double u_e,
                         double gamma) { return SingleTubeSolution({radius, rho, u_hat, u_e, gamma}, law); }),
             py::arg("law"), py::arg("radius") = 0.01, py::arg("rho") = 0.05, py::arg("u_hat") = 0.5,
             py::arg("u_e") = 0.1, py::arg("gamma") = 1.0)
        .def_property_readonly("q", &SingleTubeSolution::q)
        .def("psi", &SingleTubeSolution::psi, py::arg("r"))
        .def("u", &SingleTubeSolution::u, py::arg("r"));

    py::class_<TubeSpec>(m, "TubeSpec")
        .def(py::init<double, double, double, double, double, double>(), py::arg("x"), py::arg("y"),
             py::arg("radius"), py::arg("rho"), py::arg("gamma"), py::arg("u_e"))
        .def_readwrite("x", &TubeSpec::x)
        .def_readwrite("y", &TubeSpec::y)
        .def_readwrite("radius", &TubeSpec::radius)
        .def_readwrite("rho", &TubeSpec::rho)
        .def_readwrite("gamma", &TubeSpec::gamma)
        .def_readwrite("u_e", &TubeSpec::u_e);

    py::class_<MultiTubeSolution>(m, "MultiTubeSolution")
        .def_readonly("u_hat", &MultiTubeSolution::u_hat)
        .def_readonly("q", &MultiTubeSolution::q)
        .def_readonly("c_psi", &MultiTubeSolution::c_psi)
        .def_readonly("iterations", &MultiTubeSolution::iterations)
        .def("psi", &MultiTubeSolution::psi, py::arg("x"), py::arg("y"))
        .def("u", &MultiTubeSolution::u, py::arg("x"), py::arg("y"))
        .def("residuals", &MultiTubeSolution::residuals, py::arg("points") = 256)
        .def("to_json", &MultiTubeSolution::to_json);

    m.def(
        "solve_multi_tube",
        [](const std::vector<TubeSpec>& tubes, const DiffusionLaw& law, int anchor, double anchor_value,
           bool tilde) {
            return solve_multi_tube(tubes, law, anchor, anchor_value,
                                    tilde ? ReferenceVariant::UTilde : ReferenceVariant::U);
        },
        py::arg("tubes"), py::arg("law"), py::arg("anchor") = 0, py::arg("anchor_value") = 0.8,
        py::arg("tilde") = false);

    py::class_<ScenarioConfig>(m, "Config")
        .def_static("parse", &parse_config_string, py::arg("text"), py::arg("source") = "<config>")
        .def_static("load", &load_config, py::arg("path"))
        .def_static(
            "default", [](const std::string& kind) { return default_config(kind_from(kind)); }, py::arg("kind"))
        .def_property_readonly("kind", [](const ScenarioConfig& c) { return to_string(c.kind); })
        .def_readwrite("name", &ScenarioConfig::name)
        .def("validate", &ScenarioConfig::validate)
        .def("to_ini", &emit_config_string)
        .def("__eq__", [](const ScenarioConfig& a, const ScenarioConfig& b) { return a == b; })
        .def("__repr__", [](const ScenarioConfig& c) { return "<Config " + to_string(c.kind) + " '" + c.name + "'>"; });

    m.def("soil_pressure", &root_soil_pressure, py::arg("config"),
          "Bulk pressure of a root_soil config, derived from water_saturation when not given.");

    py::class_<ScenarioResult>(m, "Result")
        .def_readonly("config", &ScenarioResult::config)
        .def_readonly("soil_pressure", &ScenarioResult::soil_pressure)
        .def_property_readonly("errors",
                               [](const ScenarioResult& r) {
                                   py::list l;
                                   for (const auto& row : r.errors.rows) l.append(error_row(row));
                                   return l;
                               })
        .def_property_readonly("transpiration",
                               [](const ScenarioResult& r) {
                                   py::list l;
                                   for (const auto& row : r.transpiration) l.append(transpiration_row(row));
                                   return l;
                               })
        .def_property_readonly("segments",
                               [](const ScenarioResult& r) {
                                   py::list l;
                                   for (const auto& row : r.segments) l.append(segment_row(row));
                                   return l;
                               })
        .def_readonly("references_json", &ScenarioResult::references_json)
        .def("write", &write_outputs, py::arg("directory"));

    m.def(
        "run",
        [](const ScenarioConfig& config, bool keep_fields) {
            RunOptions opt;
            opt.keep_fields = keep_fields;
            py::gil_scoped_release release;
            return run_scenario(config, opt);
        },
        py::arg("config"), py::arg("keep_fields") = true);

    py::class_<CriterionResult>(m, "CriterionResult")
        .def_readonly("id", &CriterionResult::id)
        .def_readonly("name", &CriterionResult::name)
        .def_readonly("passed", &CriterionResult::passed)
        .def_readonly("detail", &CriterionResult::detail)
        .def_readonly("seconds", &CriterionResult::seconds)
        .def("__str__", &format_criterion);

    m.def(
        "verify",
        [](std::vector<int> only, int threads) {
            AcceptanceOptions opt;
            opt.only = std::move(only);
            opt.threads = threads;
            py::gil_scoped_release release;
            return run_acceptance(opt);
        },
        py::arg("criteria") = std::vector<int>{}, py::arg("threads") = 1);

    m.attr("ERRORS_SCHEMA") = kErrorsSchema;
    m.attr("TRANSPIRATION_SCHEMA") = kTranspirationSchema;
    m.attr("SEGMENTS_SCHEMA") = kSegmentsSchema;
}
