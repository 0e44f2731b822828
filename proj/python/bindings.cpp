// Python surface: model spectra, phase-space checks, Fock operators, and the
// config-driven runner. Matrices cross as numpy arrays.

#include <memory>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adsholo/ads_model.hpp"
#include "adsholo/ccr_fock.hpp"
#include "adsholo/config.hpp"
#include "adsholo/errors.hpp"
#include "adsholo/holography.hpp"
#include "adsholo/phase_core.hpp"

namespace py = pybind11;
using namespace adsholo;

namespace {

Component component_of(const std::string& s) {
    if (s == "-") return Component::Minus;
    if (s == "+") return Component::Plus;
    throw Error(ErrorCode::InvalidInput, "component must be '-' or '+', got '" + s + "'");
}

BoundaryRegion region_of(const std::vector<std::tuple<std::string, double, double>>& segs) {
    BoundaryRegion O;
    for (const auto& [c, a, b] : segs) O.segments.push_back({component_of(c), {a, b}});
    return O;
}

py::dict positivity(const Mat& eta, const Mat& sigma, double c) {
    const PhaseSpace ps(eta, sigma);
    const auto r = check_positivity(ps, c);
    py::dict d;
    d["holds"] = r.holds;
    d["domination_norm"] = r.domination_norm;
    return d;
}

py::dict kahler(const Mat& eta, const Mat& sigma) {
    const PhaseSpace ps(eta, sigma);
    const KahlerData kd = kahler_from_covariance(ps);
    py::dict d;
    d["b"] = kd.b;
    d["b_modulus"] = kd.b_modulus;
    d["j"] = kd.j;
    d["pure"] = kd.pure;
    d["doubled_dim"] = kd.doubled_dim;
    return d;
}

CMat weyl(int m, int n_max, const CVec& h) {
    return weyl_operator(std::make_shared<const FockRep>(m, n_max), h).entries;
}

std::tuple<int, std::string> run(const std::string& command, const std::string& config_text, const std::string& out) {
    RunConfig cfg = parse_config_text(config_text);
    if (!out.empty()) cfg.out_dir = out;
    std::ostringstream report;
    const int code = run_command(command, cfg, report);
    return {code, report.str()};
}

py::list inclusion(const std::string& config_text) {
    const RunConfig cfg = parse_config_text(config_text);
    const auto tab = run_inclusion(cfg.plan);
    py::list rows;
    for (const auto& r : tab.rows) {
        py::dict d;
        d["dict_size"] = r.dict_size;
        d["max_residual"] = r.max_residual;
        d["mean_residual"] = r.mean_residual;
        d["witness_ok"] = r.witness_ok;
        d["sigma_min_ref"] = r.sigma_min_ref;
        rows.append(d);
    }
    return rows;
}

} // namespace

PYBIND11_MODULE(_adsholo, m) {
    m.doc() = "AdS2 strip holography laboratory";
    m.attr("__version__") = "0.1.0";

    py::register_exception<Error>(m, "AdsholoError", PyExc_ValueError);

    py::class_<AdsStripModel>(m, "Model")
        .def(py::init([](double nu, int K, int N, bool cross_validate) {
                 ModelParams p;
                 p.nu = nu;
                 p.K = K;
                 p.N = N;
                 p.cross_validate = cross_validate;
                 return build_model(p);
             }),
             py::arg("nu") = 0.7, py::arg("K") = 30, py::arg("N") = 512, py::arg("cross_validate") = false)
        .def_property_readonly("nu", &AdsStripModel::nu)
        .def_property_readonly("nu_plus", &AdsStripModel::nu_plus)
        .def_property_readonly("K", &AdsStripModel::K)
        .def_property_readonly("N", &AdsStripModel::N)
        .def_property_readonly("x", &AdsStripModel::x)
        .def_property_readonly("weights", &AdsStripModel::weights)
        .def_property_readonly("omegas", &AdsStripModel::omegas)
        .def_property_readonly("mode_matrix", &AdsStripModel::mode_matrix)
        .def_property_readonly("time_step", &AdsStripModel::time_step)
        .def_property_readonly("orthonormality_defect", &AdsStripModel::orthonormality_defect)
        .def_property_readonly("fd_deviation", &AdsStripModel::fd_deviation)
        .def("betas", [](const AdsStripModel& mdl, const std::string& c) { return mdl.betas(component_of(c)); },
             py::arg("component"))
        .def("modes_at", &AdsStripModel::modes_at, py::arg("x"))
        .def(
            "uc_scan",
            [](const AdsStripModel& mdl, const std::vector<std::tuple<std::string, double, double>>& segs, int k_eff,
               double step) {
                const auto r = uc_scan(mdl, region_of(segs), k_eff, step);
                return std::make_tuple(r.sigma_min, r.singular_values);
            },
            py::arg("region"), py::arg("k_eff"), py::arg("t_step") = 0.01,
            "region is a list of (component, a, b); returns (sigma_min, singular_values)");

    m.def("fd_spectrum", [](double nu, int count, int n) { return fd_spectrum(nu, count, n); }, py::arg("nu"),
          py::arg("count"), py::arg("n") = 2000);
    m.def("check_positivity", &positivity, py::arg("eta"), py::arg("sigma"), py::arg("c") = 2.0);
    m.def("kahler_from_covariance", &kahler, py::arg("eta"), py::arg("sigma"));
    m.def("weyl_operator", &weyl, py::arg("m"), py::arg("n_max"), py::arg("h"));
    m.def("fock_dimension", &fock_dimension, py::arg("m"), py::arg("n_max"));

    m.def("default_config_text", &defaults_text);
    m.def("normalize_config", [](const std::string& t) { return serialize_config(parse_config_text(t)); },
          py::arg("text"), "parse and re-serialize a config");
    m.def("command_names", &command_names);
    m.def("run", &run, py::arg("command"), py::arg("config") = "", py::arg("out_dir") = "",
          "runs one command; returns (exit_code, report)");
    m.def("run_inclusion", &inclusion, py::arg("config") = "");
}
