#include <sstream>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cloaksim/beam_optics.hpp"
#include "cloaksim/cli.hpp"
#include "cloaksim/config.hpp"
#include "cloaksim/errors.hpp"
#include "cloaksim/fit_models.hpp"
#include "cloaksim/fit_zstack.hpp"
#include "cloaksim/imaging.hpp"
#include "cloaksim/lineshape_model.hpp"
#include "cloaksim/scan_pipeline.hpp"
#include "cloaksim/tls_dynamics.hpp"
#include "cloaksim/transparency.hpp"
#include "cloaksim/units.hpp"

namespace py = pybind11;
using namespace cloaksim;

namespace {

py::array_t<double> to_numpy(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return std::vector<double>(a.data(), a.data() + a.size());
}

py::dict fit_to_dict(const FitResult& f) {
    py::dict d;
    py::dict params, errors;
    for (std::size_t k = 0; k < f.names.size(); ++k) {
        params[py::str(f.names[k])] = f.parameters[k];
        errors[py::str(f.names[k])] = f.standard_errors[k];
    }
    d["parameters"] = params;
    d["errors"] = errors;
    d["rss"] = f.rss;
    d["reduced_chi_square"] = f.reduced_chi_square();
    d["iterations"] = f.iterations;
    d["converged"] = f.converged;
    d["termination"] = f.termination;
    d["warnings"] = f.warnings;
    return d;
}

Spectrum make_spectrum(const py::array_t<double>& nu, const py::array_t<double>& values, SpectrumKind kind) {
    Spectrum s;
    s.frequency_hz = to_vector(nu);
    s.values = to_vector(values);
    s.kind = kind;
    s.validate();
    return s;
}

}  // namespace

PYBIND11_MODULE(_cloaksim, m) {
    m.attr("__version__") = CLOAKSIM_VERSION;

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<DetectionError>(m, "DetectionError", base.ptr());
    py::register_exception<SamplingError>(m, "SamplingError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    py::enum_<SpectrumKind>(m, "SpectrumKind")
        .value("transmission", SpectrumKind::transmission)
        .value("fluorescence", SpectrumKind::fluorescence);

    py::class_<Spectrum>(m, "Spectrum")
        .def(py::init(&make_spectrum), py::arg("frequency_hz"), py::arg("values"),
             py::arg("kind") = SpectrumKind::transmission)
        .def_property_readonly("frequency_hz", [](const Spectrum& s) { return to_numpy(s.frequency_hz); })
        .def_property_readonly("values", [](const Spectrum& s) { return to_numpy(s.values); })
        .def_readonly("kind", &Spectrum::kind)
        .def("__len__", &Spectrum::size);

    py::class_<FocusParams>(m, "FocusParams")
        .def_readwrite("wavelength_nm", &FocusParams::wavelength_nm)
        .def_readwrite("focal_fwhm_nm", &FocusParams::focal_fwhm_nm)
        .def_readwrite("rayleigh_range_nm", &FocusParams::rayleigh_range_nm)
        .def_readwrite("z_nm", &FocusParams::z_nm);
    m.def("make_focus", &make_focus, py::arg("wavelength_nm") = 740.0, py::arg("focal_fwhm_nm") = 270.0,
          py::arg("refractive_index") = 1.5, py::arg("rayleigh_range_nm") = 0.0);
    m.def("gouy_phase", &gouy_phase, py::arg("z_nm"), py::arg("rayleigh_range_nm"));
    m.def("axial_envelope", &axial_envelope, py::arg("z_nm"), py::arg("rayleigh_range_nm"));
    m.def("sigma0", &sigma0, py::arg("wavelength_nm"));
    m.def("zeta_from_dip", &zeta_from_dip, py::arg("dip"));
    m.def("dip_from_zeta", &dip_from_zeta, py::arg("zeta"));

    py::class_<EmitterParams>(m, "EmitterParams")
        .def(py::init<>())
        .def_static("from_lifetime", &EmitterParams::from_lifetime, py::arg("t1_s"),
                    py::arg("pure_dephasing_hz") = 0.0, py::arg("resonance_hz") = 404.96e12,
                    py::arg("branching_ratio") = 0.44)
        .def_readwrite("resonance_hz", &EmitterParams::resonance_hz)
        .def_readwrite("radiative_rate", &EmitterParams::radiative_rate)
        .def_readwrite("nonradiative_rate", &EmitterParams::nonradiative_rate)
        .def_readwrite("pure_dephasing", &EmitterParams::pure_dephasing)
        .def_property_readonly("gamma1", &EmitterParams::gamma1)
        .def_property_readonly("gamma2", &EmitterParams::gamma2)
        .def_property_readonly("lifetime_s", &EmitterParams::lifetime_s);
    m.def("linewidth_from_lifetime", &linewidth_from_lifetime, py::arg("t1_s"));
    m.def("total_fwhm", &total_fwhm, py::arg("gamma1"), py::arg("pure_dephasing"));
    m.def("pure_dephasing_from_widths", &pure_dephasing_from_widths, py::arg("fwhm_hz"),
          py::arg("lifetime_width_hz"));
    m.def("lifetime_ratio", &lifetime_ratio, py::arg("t1_long_s"), py::arg("t1_short_s"));
    m.def("saturation_parameter", &saturation_parameter, py::arg("rabi"), py::arg("emitter"));
    m.def("power_broadened_fwhm", &power_broadened_fwhm, py::arg("rabi"), py::arg("emitter"));
    m.def(
        "steady_state_population",
        [](double rabi, double detuning, const EmitterParams& e) {
            return steady_state_population({rabi, detuning}, e);
        },
        py::arg("rabi"), py::arg("detuning"), py::arg("emitter"));
    m.def(
        "g2",
        [](const py::array_t<double>& tau, double rabi, const EmitterParams& e, double detuning) {
            return to_numpy(g2(to_vector(tau), {rabi, detuning}, e));
        },
        py::arg("tau_s"), py::arg("rabi"), py::arg("emitter"), py::arg("detuning") = 0.0);

    py::class_<HybridModel>(m, "HybridModel")
        .def_readwrite("coupling", &HybridModel::coupling)
        .def_readwrite("zeta_p", &HybridModel::zeta_p)
        .def_readwrite("phase_offset", &HybridModel::phase_offset)
        .def_readwrite("focus", &HybridModel::focus)
        .def_property_readonly("molecule_resonance_hz",
                               [](const HybridModel& h) { return to_hz(h.molecule.resonance); })
        .def_property_readonly("plasmon_resonance_hz",
                               [](const HybridModel& h) { return to_hz(h.plasmon.resonance); });

    py::class_<TransparencyObservables>(m, "TransparencyObservables")
        .def(py::init<>())
        .def_readwrite("feature_center_hz", &TransparencyObservables::feature_center_hz)
        .def_readwrite("transmission_increase", &TransparencyObservables::transmission_increase)
        .def_readwrite("feature_fwhm_hz", &TransparencyObservables::feature_fwhm_hz)
        .def_readwrite("lamb_shift_hz", &TransparencyObservables::lamb_shift_hz)
        .def_readwrite("induced_width_hz", &TransparencyObservables::induced_width_hz)
        .def_readwrite("symmetric_on_focus", &TransparencyObservables::symmetric_on_focus);
    m.def("design_transparency_model", &design_transparency_model, py::arg("observables"),
          py::arg("plasmon_fwhm_hz"), py::arg("focus"), py::arg("phase_offset") = 0.0);
    m.def(
        "composite_transmission",
        [](const py::array_t<double>& grid, const HybridModel& model, double z_nm) {
            return composite_transmission(to_vector(grid), model, z_nm);
        },
        py::arg("grid_hz"), py::arg("model"), py::arg("z_nm") = 0.0);
    m.def(
        "generate_zstack",
        [](const py::array_t<double>& grid, const HybridModel& model, const py::array_t<double>& z) {
            return generate_zstack(to_vector(grid), model, to_vector(z)).spectra;
        },
        py::arg("grid_hz"), py::arg("model"), py::arg("z_nm"));
    m.def("axial_positions", &axial_positions, py::arg("n"), py::arg("total_distance_nm"),
          py::arg("center_nm") = 0.0);
    m.def(
        "transmission_change",
        [](const py::array_t<double>& grid, const HybridModel& model, double z_nm) {
            return transmission_change(to_vector(grid), model, z_nm).relative_change;
        },
        py::arg("grid_hz"), py::arg("model"), py::arg("z_nm") = 0.0);
    m.def(
        "hybridized_emitter",
        [](const HybridModel& model) {
            const Hybridization h = hybridized_emitter(model);
            py::dict d;
            d["lamb_shift_hz"] = h.lamb_shift_hz;
            d["induced_width_hz"] = h.induced_width_hz;
            d["total_width_hz"] = h.total_width_hz;
            d["adiabatic"] = h.adiabatic;
            return d;
        },
        py::arg("model"));
    m.def(
        "analyze_feature",
        [](const Spectrum& s, double lo, double hi) {
            FeatureOptions opt;
            opt.window_lo_hz = lo;
            opt.window_hi_hz = hi;
            const FeatureMetrics f = analyze_feature(s, opt);
            py::dict d;
            d["asymmetry"] = f.asymmetry;
            d["contrast"] = f.contrast;
            d["centroid_hz"] = f.centroid_hz;
            d["noise_rms"] = f.noise_rms;
            return d;
        },
        py::arg("spectrum"), py::arg("window_lo_hz") = 0.0, py::arg("window_hi_hz") = 0.0);

    m.def(
        "fit_lorentzian",
        [](const Spectrum& s, bool counts) {
            return fit_to_dict(fit_lorentzian(s, {}, counts ? Weighting::counts : Weighting::uniform));
        },
        py::arg("spectrum"), py::arg("counts_weighting") = false);
    m.def(
        "fit_saturation",
        [](const py::array_t<double>& p, const py::array_t<double>& r) {
            return fit_to_dict(fit_saturation(to_vector(p), to_vector(r)));
        },
        py::arg("powers"), py::arg("rates"));
    m.def(
        "fit_zstack",
        [](const std::vector<Spectrum>& stack, const HybridModel& template_model, double z_step_nm) {
            ZStackFitSettings base;
            base.initial = template_model;
            base.z_step_nm = z_step_nm;
            const ZStackFit f = fit_zstack(stack, guess_zstack(stack, base));
            return py::make_tuple(fit_to_dict(f.fit), f.model);
        },
        py::arg("stack"), py::arg("template"), py::arg("z_step_nm"));

    m.def(
        "simulate_scans",
        [](double fwhm_hz, double jitter_hz, std::size_t n_scans, std::uint64_t seed) {
            ScanConfig cfg;
            cfg.n_scans = n_scans;
            const ScanSet set = simulate_scan_set(cfg, {JitterKind::gaussian_per_scan, jitter_hz},
                                                  lorentzian_lineshape(fwhm_hz), seed);
            const auto [aligned, diag] = align_and_average(set, {.fwhm_hint_hz = fwhm_hz});
            return py::make_tuple(aligned.to_spectrum(), naive_average(set).to_spectrum());
        },
        py::arg("fwhm_hz"), py::arg("jitter_hz"), py::arg("n_scans") = 240, py::arg("seed") = 1);

    m.def("psf_sigma_nm", &psf_sigma_nm, py::arg("fwhm_nm"));
    m.def("localization_precision", &localization_precision, py::arg("sigma_nm"), py::arg("photons"));
    m.def("photons_for_precision", &photons_for_precision, py::arg("sigma_nm"), py::arg("precision_nm"));
    m.def(
        "localize",
        [](double x_nm, double y_nm, double photons, double background, std::uint64_t seed) {
            PsfSimulation sim = centered_frame(x_nm, y_nm, 50.0, 21, 21);
            sim.total_counts = photons;
            sim.background_per_pixel = background;
            const Localization loc = localize_psf(simulate_psf_image(sim, make_focus(740.0, 270.0), seed));
            py::dict d;
            d["x_nm"] = loc.x_nm;
            d["y_nm"] = loc.y_nm;
            d["precision_nm"] = loc.precision_nm();
            d["sigma_nm"] = loc.sigma_nm;
            return d;
        },
        py::arg("x_nm"), py::arg("y_nm"), py::arg("photons"), py::arg("background") = 0.0,
        py::arg("seed") = 1);

    m.def(
        "config_json",
        [](const std::string& text) { return config_to_json(parse_config(text)); },
        py::arg("text") = "{}");
    m.def(
        "run",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv = {"cloaksim"};
            for (const std::string& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
