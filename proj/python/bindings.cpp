#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "oscillab/effective_kinetic.hpp"
#include "oscillab/experiment.hpp"
#include "oscillab/linear_modes.hpp"
#include "oscillab/young_measure.hpp"

namespace py = pybind11;
using namespace oscillab;

namespace {

MatchIdentity identity_from(const std::string& s) {
    if (s == "shear") return MatchIdentity::Shear;
    if (s == "gas") return MatchIdentity::Gas;
    if (s == "pressure") return MatchIdentity::Pressure;
    throw std::invalid_argument("identity must be shear, gas or pressure");
}

std::function<double(double)> affine(double slope, double offset) {
    return [=](double u) { return slope * u + offset; };
}

py::dict manifest_dict(const RunResult& r) {
    py::list checks;
    for (const auto& c : r.manifest.checks) {
        py::dict d;
        d["name"] = c.name;
        d["value"] = c.value;
        d["threshold"] = c.threshold;
        d["relation"] = c.relation;
        d["pass"] = c.pass;
        checks.append(d);
    }
    py::dict out;
    out["name"] = r.manifest.name;
    out["kind"] = r.manifest.kind;
    out["dir"] = r.dir.string();
    out["all_passed"] = r.manifest.all_passed();
    out["checks"] = checks;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.attr("__version__") = OSCILLAB_VERSION;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<ConstitutiveLaw>(m, "Law")
        .def("__call__", &ConstitutiveLaw::value)
        .def("__call__",
             [](const ConstitutiveLaw& l, const std::vector<double>& u) {
                 std::vector<double> out(u.size());
                 for (std::size_t i = 0; i < u.size(); ++i) out[i] = l(u[i]);
                 return out;
             })
        .def("deriv", &ConstitutiveLaw::deriv)
        .def("energy", &ConstitutiveLaw::energy)
        .def_property_readonly("knots", &ConstitutiveLaw::knots)
        .def_property_readonly("values", &ConstitutiveLaw::values)
        .def("to_json", [](const ConstitutiveLaw& l) { return l.to_json().dump(); })
        .def_static("from_json", [](const std::string& s) { return ConstitutiveLaw::from_json(nlohmann::json::parse(s)); })
        .def("hash", &ConstitutiveLaw::hash)
        .def("perturbed", &ConstitutiveLaw::perturbed, py::arg("knot"), py::arg("delta"));

    m.def("cubic", &ConstitutiveLaw::analytic_cubic, py::arg("shift") = 0.0);
    m.def("linear", &ConstitutiveLaw::linear, py::arg("slope"), py::arg("offset") = 0.0);
    m.def("tabulated", [](std::vector<double> x, std::vector<double> y) { return ConstitutiveLaw::tabulated(x, y); });
    m.def(
        "matched_shear",
        [](double a, double b, double slope, double offset) {
            return build_matched_shear_stress(a, b, affine(slope, offset));
        },
        py::arg("a"), py::arg("b"), py::arg("branch_slope") = 1.0, py::arg("branch_offset") = 0.0);
    m.def(
        "matched_gas",
        [](double a, double b, double slope, double offset) {
            return build_matched_gas_stress(a, b, affine(slope, offset));
        },
        py::arg("a"), py::arg("b"), py::arg("branch_slope") = 1.0, py::arg("branch_offset") = 0.0);
    m.def(
        "matched_pressure",
        [](double a, double b, int d, double slope, double offset) {
            return build_matched_pressure(a, b, d, affine(slope, offset));
        },
        py::arg("a"), py::arg("b"), py::arg("d") = 1, py::arg("branch_slope") = 1.0, py::arg("branch_offset") = 0.0);
    m.def(
        "matching_residual",
        [](const ConstitutiveLaw& l, const std::string& id, double a, double b, int d) {
            return matching_residual(l, identity_from(id), a, b, d);
        },
        py::arg("law"), py::arg("identity"), py::arg("a"), py::arg("b"), py::arg("d") = 1);

    m.def("amplitude_roots", [](double lam, double mu, double n) -> py::tuple {
        const auto r = amplitude_roots_1d(lam, mu, n);
        if (r.complex_regime) return py::make_tuple(r.c_plus, r.c_minus);
        return py::make_tuple(r.plus, r.minus);
    });
    m.def("slow_root_series", &slow_root_series);
    m.def("thermo_roots", [](double lam, double mu, double mm, double kappa, double n) {
        const auto r = thermo_roots(LinearParams{lam, mu, mm, kappa, n});
        return std::vector<cplx>(r.begin(), r.end());
    });

    m.def("two_point_column", &two_point_column);
    m.def("step_column", &step_column);
    m.def("column_distance", [](const std::vector<double>& xi, const std::vector<double>& a,
                                const std::vector<double>& b) { return column_distance(xi, a, b); });
    m.def("column_spread", [](const std::vector<double>& xi, const std::vector<double>& F) {
        return column_spread(xi, F);
    });
    m.def(
        "column_moment",
        [](const std::vector<double>& xi, const std::vector<double>& F, int power) {
            return column_moment(xi, F, Integrand::power(power));
        },
        py::arg("xi"), py::arg("F"), py::arg("power") = 1);

    m.def(
        "frozen_kinetics",
        [](const std::vector<double>& xi, const std::vector<double>& F0, const ConstitutiveLaw& law, double S0,
           double T) {
            const auto r = frozen_kinetics(xi, F0, law, S0, T);
            py::dict d;
            d["F"] = r.F;
            d["limit"] = r.limit;
            d["distance_to_limit"] = r.distance_to_limit;
            d["stable_roots"] = r.report.stable_roots;
            d["weights"] = r.report.weights;
            d["measured_weights"] = r.measured_weights;
            return d;
        },
        py::arg("xi"), py::arg("F0"), py::arg("law"), py::arg("S0"), py::arg("T"));

    m.def("validate", [](const std::string& path) {
        const auto cfg = load_config(path);
        validate_config(cfg);
        return plan(cfg);
    });
    m.def(
        "run",
        [](const std::string& path, const std::string& out, double tol_scale) {
            RunOptions opt;
            opt.out_root = resolve_out_root(out.empty() ? std::nullopt : std::optional<std::string>(out));
            opt.tol_scale = tol_scale;
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run_experiment(load_config(path), opt);
            }
            return manifest_dict(r);
        },
        py::arg("config"), py::arg("out") = "", py::arg("tol_scale") = 1.0);
}
