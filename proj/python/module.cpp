#include "cvlambda/analytic.hpp"
#include "cvlambda/correlation.hpp"
#include "cvlambda/errors.hpp"
#include "cvlambda/fluctuation.hpp"
#include "cvlambda/model.hpp"
#include "cvlambda/scenario.hpp"
#include "cvlambda/sweep.hpp"
#include "cvlambda/vortex.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace cvlambda;

namespace {

PropagationMode mode_from(const std::string& s) {
    if (s == "full") return PropagationMode::full;
    if (s == "stable") return PropagationMode::stable;
    throw InvalidParams("mode must be 'full' or 'stable'");
}

// Round-trips through JSON text so the Python side sees plain dicts and lists.
py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object& o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Continuous-variable entanglement in a coherently prepared Lambda medium";
    m.attr("__version__") = kToolVersion;

    auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    static PyObject* base_type = base.ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(base_type, (e.kind() + ": " + e.what()).c_str());
        }
    });

    py::enum_<GroundDetuning>(m, "GroundDetuning")
        .value("two_photon", GroundDetuning::two_photon)
        .value("printed_control", GroundDetuning::printed_control);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def(py::init([](py::kwargs kw) {
            nlohmann::json p = from_python(kw);
            if (!p.contains("alpha")) p["alpha"] = ModelParams{}.alpha;
            return parse_config(nlohmann::json{{"command", "propagate"}, {"params", p}}).params;
        }))
        .def_readwrite("gamma", &ModelParams::gamma)
        .def_readwrite("gamma1", &ModelParams::gamma1)
        .def_readwrite("gamma2", &ModelParams::gamma2)
        .def_readwrite("gamma12", &ModelParams::gamma12)
        .def_readwrite("gamma_phi", &ModelParams::gamma_phi)
        .def_readwrite("delta", &ModelParams::delta)
        .def_readwrite("delta_s", &ModelParams::delta_s)
        .def_readwrite("delta_c", &ModelParams::delta_c)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("c1", &ModelParams::c1)
        .def_readwrite("c2", &ModelParams::c2)
        .def_readwrite("omega_in", &ModelParams::omega_in)
        .def_readwrite("ground_detuning", &ModelParams::ground_detuning)
        .def("detuning_s", &ModelParams::detuning_s)
        .def("detuning_c", &ModelParams::detuning_c)
        .def("validate", &ModelParams::validate)
        .def("to_dict", [](const ModelParams& p) { return to_python(resolved_params_json(p)); });

    py::class_<FieldState>(m, "FieldState")
        .def_readonly("xi", &FieldState::xi)
        .def_readonly("omega_c", &FieldState::omega_c)
        .def_readonly("omega_s", &FieldState::omega_s)
        .def_readonly("beta1", &FieldState::beta1)
        .def_readonly("beta2", &FieldState::beta2)
        .def_readonly("w_const", &FieldState::w_const);

    py::class_<MeanFieldCoherences>(m, "MeanFieldCoherences")
        .def_readonly("sigma_g1e", &MeanFieldCoherences::sigma_g1e)
        .def_readonly("sigma_g2e", &MeanFieldCoherences::sigma_g2e)
        .def_readonly("sigma_g1g1", &MeanFieldCoherences::sigma_g1g1)
        .def_readonly("sigma_g2g2", &MeanFieldCoherences::sigma_g2g2)
        .def_readonly("sigma_ee", &MeanFieldCoherences::sigma_ee)
        .def_readonly("sigma_g1g2", &MeanFieldCoherences::sigma_g1g2);

    m.def("beta_coefficients", [](const ModelParams& p) {
        const auto b = beta_coefficients(p);
        return py::make_tuple(b.beta1, b.beta2, b.w_const);
    });
    m.def("propagate_mean_field", &propagate_mean_field, py::arg("params"), py::arg("xi"));
    m.def("integrate_mean_field", &integrate_mean_field, py::arg("params"), py::arg("xi"),
          py::arg("rtol") = 1e-12, py::arg("atol") = 1e-14);
    m.def("stable_fields", &stable_fields);
    m.def("mean_field_coherences", &mean_field_coherences);

    m.def(
        "assemble",
        [](const ModelParams& p, const FieldState& f, double g) {
            const auto a = assemble(p, f, g);
            py::dict d;
            d["m1"] = Eigen::MatrixXcd(a.m1);
            d["m2"] = Eigen::MatrixXcd(a.m2);
            d["t"] = Eigen::MatrixXcd(a.t);
            d["drift"] = Eigen::MatrixXcd(a.drift);
            d["noise"] = Eigen::MatrixXcd(a.noise);
            return d;
        },
        py::arg("params"), py::arg("fields"), py::arg("g") = 1.0);

    py::class_<EntanglementResult>(m, "EntanglementResult")
        .def_readonly("v", &EntanglementResult::v)
        .def_readonly("n_s", &EntanglementResult::n_s)
        .def_readonly("n_c", &EntanglementResult::n_c)
        .def_readonly("cross", &EntanglementResult::cross)
        .def_readonly("theta_opt", &EntanglementResult::theta_opt);

    m.def(
        "propagate_correlations",
        [](const ModelParams& p, double xi_end, const std::string& mode) {
            return Eigen::MatrixXcd(propagate_correlations(p, xi_end, mode_from(mode)).corr);
        },
        py::arg("params"), py::arg("xi_end") = 1.0, py::arg("mode") = "stable");
    m.def("dgcz_value", [](const Eigen::Matrix4cd& corr) { return dgcz_value(Mat4(corr)); });
    m.def("dgcz_theta", [](const Eigen::Matrix4cd& corr, double theta) {
        return dgcz_theta(Mat4(corr), theta);
    });
    m.def(
        "entanglement",
        [](const ModelParams& p, const std::string& mode) {
            return entanglement_at_exit(p, mode_from(mode));
        },
        py::arg("params"), py::arg("mode") = "stable");

    m.def("approx_coefficients", [](const ModelParams& p) {
        const auto c = approx_coefficients(p);
        return py::make_tuple(c.p1, c.s1, c.r2, c.q2);
    });
    m.def("analytic_v", [](const ModelParams& p) { return analytic_v(p).nu; });
    m.def("coefficient_scaling_estimates", [](const ModelParams& p, double xi) {
        const auto e = coefficient_scaling_estimates(p, xi);
        return py::make_tuple(e.two_photon_estimate, e.relaxation_estimate);
    });

    m.def(
        "grid_sweep",
        [](const std::vector<std::pair<std::string, std::vector<double>>>& axes,
           const ModelParams& fixed, const std::string& mode, unsigned workers) {
            std::vector<SweepAxis> ax;
            for (const auto& [name, values] : axes)
                ax.push_back({parameter_from_string(name), values, Spacing::linear});
            SweepOptions opt;
            opt.workers = workers;
            const auto r = grid_sweep(ax, fixed, mode_from(mode), opt);
            py::dict d;
            d["v_table"] = r.v_table;
            d["shape"] = r.shape();
            d["argmin"] = py::make_tuple(r.argmin.coords, r.argmin.value);
            d["refined_min"] = py::make_tuple(r.refined_min.coords, r.refined_min.value);
            return d;
        },
        py::arg("axes"), py::arg("fixed"), py::arg("mode") = "stable", py::arg("workers") = 0);

    m.def(
        "optimize_v",
        [](const std::vector<std::tuple<std::string, double, double>>& bounds,
           const ModelParams& fixed, const std::string& mode, unsigned workers) {
            std::vector<ParameterBound> b;
            for (const auto& [name, lo, hi] : bounds) b.push_back({parameter_from_string(name), lo, hi, lo > 0.0});
            OptimizeOptions opt;
            opt.workers = workers;
            const auto r = optimize_v(b, fixed, mode_from(mode), opt);
            return py::make_tuple(r.params, r.v);
        },
        py::arg("bounds"), py::arg("fixed"), py::arg("mode") = "stable", py::arg("workers") = 0);

    m.def(
        "lg_amplitude",
        [](double epsilon, double waist, double charge, double r) {
            return lg_amplitude(VortexProfile{epsilon, waist, charge}, r);
        },
        py::arg("epsilon"), py::arg("waist"), py::arg("charge"), py::arg("r"));

    m.def(
        "run_scenario",
        [](const py::object& config) {
            const auto c = parse_config(from_python(config));
            py::gil_scoped_release release;
            auto out = output_document(c, run_scenario(c));
            py::gil_scoped_acquire acquire;
            return to_python(out);
        },
        "Runs a configuration dict and returns the JSON output document as a dict.");
}
