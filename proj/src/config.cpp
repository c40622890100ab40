#include "cloaksim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cloaksim/errors.hpp"
#include "cloaksim/units.hpp"

namespace cloaksim {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + "expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        for (const auto& [key, value] : j_.items()) {
            if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
                throw ConfigError("unknown key '" + qualified(key) + "'");
            }
        }
    }

    bool has(const char* key) const { return j_.contains(key); }

    Reader section(const char* key) const { return Reader(j_.at(key), qualified(key)); }

    template <class T>
    void get(const char* key, T& out) const {
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("'" + qualified(key) + "' has the wrong type");
        }
    }

    template <class T>
    void get(const char* key, std::optional<T>& out) const {
        if (!j_.contains(key)) return;
        T v{};
        get(key, v);
        out = v;
    }

    void get_path(const char* key, std::optional<fs::path>& out, const fs::path& base) const {
        std::optional<std::string> s;
        get(key, s);
        if (s) out = resolve(*s, base);
    }

    void get_paths(const char* key, std::vector<fs::path>& out, const fs::path& base) const {
        std::vector<std::string> s;
        get(key, s);
        for (const std::string& p : s) out.push_back(resolve(p, base));
    }

private:
    static fs::path resolve(const std::string& p, const fs::path& base) {
        fs::path path(p);
        return path.is_absolute() || base.empty() ? path : base / path;
    }
    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    std::string where() const { return path_.empty() ? "config: " : path_ + ": "; }

    const json& j_;
    std::string path_;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

Weighting parse_weighting(const std::string& s) {
    if (s == "uniform") return Weighting::uniform;
    if (s == "counts") return Weighting::counts;
    throw ConfigError("fit.weighting must be 'uniform' or 'counts'");
}

JitterKind parse_jitter(const std::string& s) {
    if (s == "gaussian_per_scan") return JitterKind::gaussian_per_scan;
    if (s == "random_walk") return JitterKind::random_walk;
    throw ConfigError("jitter.kind must be 'gaussian_per_scan' or 'random_walk'");
}

void parse_focus(const Reader& r, ExperimentConfig& c) {
    r.allow({"wavelength_nm", "focal_fwhm_nm", "rayleigh_range_nm", "refractive_index", "z_nm"});
    r.get("wavelength_nm", c.focus.wavelength_nm);
    r.get("focal_fwhm_nm", c.focus.focal_fwhm_nm);
    r.get("refractive_index", c.refractive_index);
    r.get("z_nm", c.focus.z_nm);
    c.focus.rayleigh_range_nm = 0.0;
    r.get("rayleigh_range_nm", c.focus.rayleigh_range_nm);
}

void parse_antenna(const Reader& r, AntennaConfig& a) {
    r.allow({"resonance_thz", "fwhm_thz", "drive_amplitude", "drive_phase_rad", "scatter_coupling", "zeta"});
    r.get("resonance_thz", a.resonance_thz);
    r.get("fwhm_thz", a.fwhm_thz);
    r.get("drive_amplitude", a.drive_amplitude);
    r.get("drive_phase_rad", a.drive_phase_rad);
    r.get("scatter_coupling", a.scatter_coupling);
    r.get("zeta", a.zeta);
}

void parse_emitter(const Reader& r, EmitterConfig& e) {
    r.allow({"resonance_thz", "lifetime_ns", "nonradiative_fraction", "pure_dephasing_mhz", "branching_ratio",
             "fwhm_mhz", "drive_amplitude", "drive_phase_rad", "scatter_coupling"});
    r.get("resonance_thz", e.resonance_thz);
    r.get("lifetime_ns", e.lifetime_ns);
    r.get("nonradiative_fraction", e.nonradiative_fraction);
    r.get("pure_dephasing_mhz", e.pure_dephasing_mhz);
    r.get("branching_ratio", e.branching_ratio);
    r.get("fwhm_mhz", e.fwhm_mhz);
    r.get("drive_amplitude", e.drive_amplitude);
    r.get("drive_phase_rad", e.drive_phase_rad);
    r.get("scatter_coupling", e.scatter_coupling);
}

void parse_hybrid(const Reader& r, HybridConfig& h) {
    r.allow({"induced_width_mhz", "coupling_rad2_per_s2", "phase_offset_rad", "design_from_observables",
             "observables"});
    r.get("induced_width_mhz", h.induced_width_mhz);
    r.get("coupling_rad2_per_s2", h.coupling_rad2_per_s2);
    if (r.has("coupling_rad2_per_s2") && !r.has("induced_width_mhz")) h.induced_width_mhz.reset();
    r.get("phase_offset_rad", h.phase_offset_rad);
    r.get("design_from_observables", h.design_from_observables);
    require(!(h.induced_width_mhz && h.coupling_rad2_per_s2),
            "hybrid: give either induced_width_mhz or coupling_rad2_per_s2, not both");
    if (r.has("observables")) {
        const Reader o = r.section("observables");
        o.allow({"feature_center_thz", "transmission_increase", "feature_fwhm_mhz", "lamb_shift_mhz",
                 "induced_width_mhz", "symmetric_on_focus"});
        TransparencyObservables& t = h.observables;
        double center_thz = t.feature_center_hz / thz, fwhm = t.feature_fwhm_hz / mhz,
               shift = t.lamb_shift_hz / mhz, induced = t.induced_width_hz / mhz;
        o.get("feature_center_thz", center_thz);
        o.get("transmission_increase", t.transmission_increase);
        o.get("feature_fwhm_mhz", fwhm);
        o.get("lamb_shift_mhz", shift);
        o.get("induced_width_mhz", induced);
        o.get("symmetric_on_focus", t.symmetric_on_focus);
        t.feature_center_hz = center_thz * thz;
        t.feature_fwhm_hz = fwhm * mhz;
        t.lamb_shift_hz = shift * mhz;
        t.induced_width_hz = induced * mhz;
    }
}

void parse_spectrum(const Reader& r, SpectrumConfig& s) {
    r.allow({"model", "scatterer", "zeta", "center_thz", "span_mhz", "points", "z_nm"});
    r.get("model", s.model);
    r.get("scatterer", s.scatterer);
    r.get("zeta", s.zeta);
    require(s.scatterer == "antenna" || s.scatterer == "emitter",
            "spectrum.scatterer must be 'antenna' or 'emitter'");
    require(!s.zeta || (*s.zeta >= 0.0 && *s.zeta < 1.0), "spectrum.zeta must lie in [0, 1)");
    r.get("center_thz", s.center_thz);
    r.get("span_mhz", s.span_mhz);
    r.get("points", s.points);
    r.get("z_nm", s.z_nm);
    require(s.model == "composite" || s.model == "single", "spectrum.model must be 'composite' or 'single'");
    require(s.span_mhz > 0.0, "spectrum.span_mhz must be positive");
    require(s.points >= 2, "spectrum.points must be at least 2");
}

void parse_zstack(const Reader& r, ZStackConfig& z) {
    r.allow({"positions", "total_distance_nm", "center_nm", "window_mhz", "noise_counts"});
    r.get("positions", z.positions);
    r.get("total_distance_nm", z.total_distance_nm);
    r.get("center_nm", z.center_nm);
    r.get("window_mhz", z.window_mhz);
    r.get("noise_counts", z.noise_counts);
    require(z.positions >= 1, "zstack.positions must be at least 1");
    require(z.total_distance_nm >= 0.0, "zstack.total_distance_nm must be non-negative");
    require(z.window_mhz > 0.0, "zstack.window_mhz must be positive");
    require(z.noise_counts >= 0.0, "zstack.noise_counts must be non-negative");
}

void parse_drive(const Reader& r, DriveConfig& d) {
    r.allow({"rabi_mhz", "detuning_mhz", "rabi_per_sqrt_nw_mhz"});
    r.get("rabi_mhz", d.rabi_mhz);
    r.get("detuning_mhz", d.detuning_mhz);
    r.get("rabi_per_sqrt_nw_mhz", d.rabi_per_sqrt_nw_mhz);
    require(d.rabi_mhz >= 0.0, "drive.rabi_mhz must be non-negative");
    require(d.rabi_per_sqrt_nw_mhz > 0.0, "drive.rabi_per_sqrt_nw_mhz must be positive");
}

void parse_g2(const Reader& r, G2Config& g) {
    r.allow({"tau_max_ns", "points", "rabi_mhz", "detuning_mhz", "signal_fraction", "noise_sigma"});
    r.get("tau_max_ns", g.tau_max_ns);
    r.get("points", g.points);
    r.get("rabi_mhz", g.rabi_mhz);
    r.get("detuning_mhz", g.detuning_mhz);
    r.get("signal_fraction", g.signal_fraction);
    r.get("noise_sigma", g.noise_sigma);
    require(g.tau_max_ns > 0.0, "g2.tau_max_ns must be positive");
    require(g.points >= 2, "g2.points must be at least 2");
    require(!g.rabi_mhz.empty(), "g2.rabi_mhz must list at least one drive");
    for (double v : g.rabi_mhz) require(v > 0.0, "g2.rabi_mhz entries must be positive");
    require(g.detuning_mhz.empty() || g.detuning_mhz.size() == g.rabi_mhz.size(),
            "g2.detuning_mhz must give one detuning per drive");
    require(g.signal_fraction > 0.0 && g.signal_fraction <= 1.0, "g2.signal_fraction must lie in (0, 1]");
    require(g.noise_sigma >= 0.0, "g2.noise_sigma must be non-negative");
}

void parse_saturation(const Reader& r, SaturationConfig& s) {
    r.allow({"powers_nw", "detection_scale", "zpl_blocked", "integration_s"});
    r.get("powers_nw", s.powers_nw);
    r.get("detection_scale", s.detection_scale);
    r.get("zpl_blocked", s.zpl_blocked);
    r.get("integration_s", s.integration_s);
    require(s.powers_nw.size() >= 3, "saturation.powers_nw needs at least three powers");
    for (double p : s.powers_nw) require(p >= 0.0, "saturation.powers_nw entries must be non-negative");
    require(s.detection_scale > 0.0, "saturation.detection_scale must be positive");
    require(s.integration_s >= 0.0, "saturation.integration_s must be non-negative");
}

void parse_scan(const Reader& r, ScanRunConfig& s) {
    r.allow({"scan_rate_ghz_per_s", "span_ghz", "n_bins", "n_scans", "mean_peak_counts", "baseline_counts",
             "noiseless", "bin_oversampling", "fwhm_mhz", "threshold_sigmas", "min_accepted"});
    double rate = s.scan.scan_rate_hz_per_s / ghz, span = s.scan.span_hz / ghz;
    r.get("scan_rate_ghz_per_s", rate);
    r.get("span_ghz", span);
    s.scan.scan_rate_hz_per_s = rate * ghz;
    s.scan.span_hz = span * ghz;
    r.get("n_bins", s.scan.n_bins);
    r.get("n_scans", s.scan.n_scans);
    r.get("mean_peak_counts", s.scan.mean_peak_counts);
    r.get("baseline_counts", s.scan.baseline_counts);
    r.get("noiseless", s.scan.noiseless);
    r.get("bin_oversampling", s.scan.bin_oversampling);
    r.get("fwhm_mhz", s.fwhm_mhz);
    r.get("threshold_sigmas", s.threshold_sigmas);
    r.get("min_accepted", s.min_accepted);
    require(s.fwhm_mhz > 0.0, "scan.fwhm_mhz must be positive");
    require(s.min_accepted >= 1, "scan.min_accepted must be at least 1");
}

void parse_jitter(const Reader& r, JitterModel& j) {
    r.allow({"kind", "sigma_mhz"});
    std::string kind = j.kind == JitterKind::gaussian_per_scan ? "gaussian_per_scan" : "random_walk";
    double sigma = j.sigma_hz / mhz;
    r.get("kind", kind);
    r.get("sigma_mhz", sigma);
    j.kind = parse_jitter(kind);
    j.sigma_hz = sigma * mhz;
    require(j.sigma_hz >= 0.0, "jitter.sigma_mhz must be non-negative");
}

void parse_fit(const Reader& r, FitConfig& f) {
    r.allow({"max_iterations", "ftol", "gtol", "xtol", "restarts", "weighting", "zstack", "g2_fit_rabi_scale"});
    r.get("max_iterations", f.lm.max_iterations);
    r.get("ftol", f.lm.ftol);
    r.get("gtol", f.lm.gtol);
    r.get("xtol", f.lm.xtol);
    r.get("restarts", f.lm.restarts);
    r.get("g2_fit_rabi_scale", f.g2_fit_rabi_scale);
    std::string w = f.weighting == Weighting::uniform ? "uniform" : "counts";
    r.get("weighting", w);
    f.weighting = parse_weighting(w);
    require(f.lm.max_iterations > 0, "fit.max_iterations must be positive");
    require(f.lm.ftol >= 0.0 && f.lm.gtol >= 0.0 && f.lm.xtol >= 0.0, "fit tolerances must be non-negative");
    require(f.lm.restarts >= 0, "fit.restarts must be non-negative");
    if (r.has("zstack")) {
        const Reader z = r.section("zstack");
        ZStackFitSettings& s = f.zstack;
        z.allow({"auto_initialize", "z_offset_nm", "z_step_nm", "fit_molecule_resonance", "fit_molecule_width",
                 "fit_coupling", "fit_zeta_p", "fit_phase_offset", "fit_rayleigh_range", "fit_z_offset",
                 "fit_z_step", "fit_plasmon_resonance", "fit_plasmon_width", "fit_molecule_scatter",
                 "fit_molecule_drive", "per_spectrum_baseline"});
        z.get("auto_initialize", f.auto_initialize);
        z.get("z_offset_nm", s.z_offset_nm);
        z.get("z_step_nm", s.z_step_nm);
        z.get("fit_molecule_resonance", s.fit_molecule_resonance);
        z.get("fit_molecule_width", s.fit_molecule_width);
        z.get("fit_coupling", s.fit_coupling);
        z.get("fit_zeta_p", s.fit_zeta_p);
        z.get("fit_phase_offset", s.fit_phase_offset);
        z.get("fit_rayleigh_range", s.fit_rayleigh_range);
        z.get("fit_z_offset", s.fit_z_offset);
        z.get("fit_z_step", s.fit_z_step);
        z.get("fit_plasmon_resonance", s.fit_plasmon_resonance);
        z.get("fit_plasmon_width", s.fit_plasmon_width);
        z.get("fit_molecule_scatter", s.fit_molecule_scatter);
        z.get("fit_molecule_drive", s.fit_molecule_drive);
        z.get("per_spectrum_baseline", s.per_spectrum_baseline);
        require(s.z_step_nm != 0.0, "fit.zstack.z_step_nm must be non-zero");
    }
}

void parse_psf(const Reader& r, PsfConfig& p) {
    r.allow({"center_x_nm", "center_y_nm", "total_counts", "background_per_pixel", "pitch_nm", "nx", "ny",
             "origin_x_nm", "origin_y_nm", "bias_x_nm", "bias_y_nm", "noiseless", "centered", "encoding",
             "detection_sigmas"});
    PsfSimulation& s = p.sim;
    r.get("center_x_nm", s.center_x_nm);
    r.get("center_y_nm", s.center_y_nm);
    r.get("total_counts", s.total_counts);
    r.get("background_per_pixel", s.background_per_pixel);
    r.get("pitch_nm", s.pitch_nm);
    r.get("nx", s.nx);
    r.get("ny", s.ny);
    r.get("origin_x_nm", s.origin_x_nm);
    r.get("origin_y_nm", s.origin_y_nm);
    r.get("bias_x_nm", s.bias_x_nm);
    r.get("bias_y_nm", s.bias_y_nm);
    r.get("noiseless", s.noiseless);
    r.get("centered", p.centered);
    r.get("encoding", p.encoding);
    r.get("detection_sigmas", p.detection_sigmas);
    require(p.encoding == "csv" || p.encoding == "binary", "psf.encoding must be 'csv' or 'binary'");
    require(s.pitch_nm > 0.0, "psf.pitch_nm must be positive");
    require(s.total_counts >= 0.0 && s.background_per_pixel >= 0.0, "psf counts must be non-negative");
}

void parse_inputs(const Reader& r, InputsConfig& in, const fs::path& base) {
    r.allow({"spectrum_csv", "zstack_csv", "g2_csv", "g2_rabi_mhz", "g2_detuning_mhz", "scans_csv", "saturation_csv",
             "image_header"});
    r.get_path("spectrum_csv", in.spectrum_csv, base);
    r.get_paths("zstack_csv", in.zstack_csv, base);
    r.get_paths("g2_csv", in.g2_csv, base);
    r.get("g2_rabi_mhz", in.g2_rabi_mhz);
    r.get("g2_detuning_mhz", in.g2_detuning_mhz);
    r.get_path("scans_csv", in.scans_csv, base);
    r.get_path("saturation_csv", in.saturation_csv, base);
    r.get_path("image_header", in.image_header, base);
    require(in.g2_csv.empty() || in.g2_rabi_mhz.size() == in.g2_csv.size(),
            "inputs.g2_rabi_mhz must give one Rabi frequency per g2 file");
    require(in.g2_detuning_mhz.empty() || in.g2_detuning_mhz.size() == in.g2_csv.size(),
            "inputs.g2_detuning_mhz must give one detuning per g2 file");
}

template <class F>
void checked(const char* what, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

EmitterParams ExperimentConfig::emitter_params() const {
    EmitterParams e = EmitterParams::from_lifetime(emitter.lifetime_ns * ns, emitter.pure_dephasing_mhz * mhz,
                                                   emitter.resonance_thz * thz, emitter.branching_ratio);
    const double g1 = e.gamma1();
    e.nonradiative_rate = emitter.nonradiative_fraction * g1;
    e.radiative_rate = g1 - e.nonradiative_rate;
    return e;
}

OscillatorParams ExperimentConfig::antenna_oscillator() const {
    return OscillatorParams::from_hz(antenna.resonance_thz * thz, antenna.fwhm_thz * thz, antenna.drive_amplitude,
                                     antenna.scatter_coupling, antenna.drive_phase_rad);
}

HybridModel ExperimentConfig::hybrid_model() const {
    if (hybrid.design_from_observables) {
        return design_transparency_model(hybrid.observables, antenna.fwhm_thz * thz, focus,
                                         hybrid.phase_offset_rad);
    }
    const EmitterParams e = emitter_params();
    const double width_hz = emitter.fwhm_mhz ? *emitter.fwhm_mhz * mhz : total_fwhm(e.gamma1(), e.pure_dephasing);
    HybridModel m;
    m.plasmon = antenna_oscillator();
    m.molecule = OscillatorParams::from_hz(emitter.resonance_thz * thz, width_hz, emitter.drive_amplitude,
                                           emitter.scatter_coupling, emitter.drive_phase_rad);
    m.zeta_p = antenna.zeta;
    m.phase_offset = hybrid.phase_offset_rad;
    m.focus = focus;
    if (hybrid.induced_width_mhz) {
        m.coupling = coupling_for_induced_width(m, *hybrid.induced_width_mhz * mhz);
    } else if (hybrid.coupling_rad2_per_s2) {
        m.coupling = *hybrid.coupling_rad2_per_s2;
    }
    m.validate();
    return m;
}

std::vector<double> ExperimentConfig::spectrum_grid_hz() const {
    const double center = spectrum.center_thz ? *spectrum.center_thz * thz : emitter.resonance_thz * thz;
    return linspace(center - 0.5 * spectrum.span_mhz * mhz, center + 0.5 * spectrum.span_mhz * mhz,
                    spectrum.points);
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    const Reader r(j, "");
    r.allow({"seed", "threads", "focus", "antenna", "emitter", "hybrid", "spectrum", "zstack", "drive", "g2",
             "saturation", "scan", "jitter", "fit", "psf", "inputs"});
    ExperimentConfig c;
    r.get("seed", c.seed);
    r.get("threads", c.threads);
    require(c.threads >= 1, "threads must be at least 1");
    if (r.has("focus")) parse_focus(r.section("focus"), c);
    if (r.has("antenna")) parse_antenna(r.section("antenna"), c.antenna);
    if (r.has("emitter")) parse_emitter(r.section("emitter"), c.emitter);
    if (r.has("hybrid")) parse_hybrid(r.section("hybrid"), c.hybrid);
    if (r.has("spectrum")) parse_spectrum(r.section("spectrum"), c.spectrum);
    if (r.has("zstack")) parse_zstack(r.section("zstack"), c.zstack);
    if (r.has("drive")) parse_drive(r.section("drive"), c.drive);
    if (r.has("g2")) parse_g2(r.section("g2"), c.g2);
    if (r.has("saturation")) parse_saturation(r.section("saturation"), c.saturation);
    if (r.has("scan")) parse_scan(r.section("scan"), c.scans);
    if (r.has("jitter")) parse_jitter(r.section("jitter"), c.scans.jitter);
    if (r.has("fit")) parse_fit(r.section("fit"), c.fit);
    if (r.has("psf")) parse_psf(r.section("psf"), c.psf);
    if (r.has("inputs")) parse_inputs(r.section("inputs"), c.inputs, base_dir);

    checked("focus", [&] {
        const double zr = c.focus.rayleigh_range_nm;
        require(zr >= 0.0, "focus.rayleigh_range_nm must be positive");
        require(c.refractive_index > 0.0, "focus.refractive_index must be positive");
        const double z = c.focus.z_nm;
        c.focus = make_focus(c.focus.wavelength_nm, c.focus.focal_fwhm_nm, c.refractive_index, zr);
        c.focus.z_nm = z;
        c.focus.validate();
    });
    checked("emitter", [&] {
        require(c.emitter.nonradiative_fraction >= 0.0 && c.emitter.nonradiative_fraction < 1.0,
                "emitter.nonradiative_fraction must lie in [0, 1)");
        c.emitter_params().validate();
    });
    checked("hybrid", [&] { c.hybrid_model().validate(); });
    checked("scan", [&] { c.scans.scan.validate(); });
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

std::string config_to_json(const ExperimentConfig& c) {
    const auto paths = [](const std::vector<fs::path>& v) {
        json a = json::array();
        for (const fs::path& p : v) a.push_back(p.string());
        return a;
    };
    json j;
    j["seed"] = c.seed;
    j["focus"] = {{"wavelength_nm", c.focus.wavelength_nm},
                  {"focal_fwhm_nm", c.focus.focal_fwhm_nm},
                  {"rayleigh_range_nm", c.focus.rayleigh_range_nm},
                  {"refractive_index", c.refractive_index},
                  {"z_nm", c.focus.z_nm}};
    j["antenna"] = {{"resonance_thz", c.antenna.resonance_thz}, {"fwhm_thz", c.antenna.fwhm_thz},
                    {"drive_amplitude", c.antenna.drive_amplitude}, {"drive_phase_rad", c.antenna.drive_phase_rad},
                    {"scatter_coupling", c.antenna.scatter_coupling}, {"zeta", c.antenna.zeta}};
    j["emitter"] = {{"resonance_thz", c.emitter.resonance_thz},
                    {"lifetime_ns", c.emitter.lifetime_ns},
                    {"nonradiative_fraction", c.emitter.nonradiative_fraction},
                    {"pure_dephasing_mhz", c.emitter.pure_dephasing_mhz},
                    {"branching_ratio", c.emitter.branching_ratio},
                    {"drive_amplitude", c.emitter.drive_amplitude},
                    {"drive_phase_rad", c.emitter.drive_phase_rad},
                    {"scatter_coupling", c.emitter.scatter_coupling}};
    if (c.emitter.fwhm_mhz) j["emitter"]["fwhm_mhz"] = *c.emitter.fwhm_mhz;
    const TransparencyObservables& o = c.hybrid.observables;
    j["hybrid"] = {{"phase_offset_rad", c.hybrid.phase_offset_rad},
                   {"design_from_observables", c.hybrid.design_from_observables},
                   {"observables",
                    {{"feature_center_thz", o.feature_center_hz / thz},
                     {"transmission_increase", o.transmission_increase},
                     {"feature_fwhm_mhz", o.feature_fwhm_hz / mhz},
                     {"lamb_shift_mhz", o.lamb_shift_hz / mhz},
                     {"induced_width_mhz", o.induced_width_hz / mhz},
                     {"symmetric_on_focus", o.symmetric_on_focus}}}};
    if (c.hybrid.induced_width_mhz) j["hybrid"]["induced_width_mhz"] = *c.hybrid.induced_width_mhz;
    if (c.hybrid.coupling_rad2_per_s2) j["hybrid"]["coupling_rad2_per_s2"] = *c.hybrid.coupling_rad2_per_s2;
    j["spectrum"] = {{"model", c.spectrum.model}, {"scatterer", c.spectrum.scatterer}, {"span_mhz", c.spectrum.span_mhz},
                     {"points", c.spectrum.points}, {"z_nm", c.spectrum.z_nm}};
    if (c.spectrum.center_thz) j["spectrum"]["center_thz"] = *c.spectrum.center_thz;
    if (c.spectrum.zeta) j["spectrum"]["zeta"] = *c.spectrum.zeta;
    j["zstack"] = {{"positions", c.zstack.positions}, {"total_distance_nm", c.zstack.total_distance_nm},
                   {"center_nm", c.zstack.center_nm}, {"window_mhz", c.zstack.window_mhz},
                   {"noise_counts", c.zstack.noise_counts}};
    j["drive"] = {{"rabi_mhz", c.drive.rabi_mhz}, {"detuning_mhz", c.drive.detuning_mhz},
                  {"rabi_per_sqrt_nw_mhz", c.drive.rabi_per_sqrt_nw_mhz}};
    j["g2"] = {{"tau_max_ns", c.g2.tau_max_ns}, {"points", c.g2.points}, {"rabi_mhz", c.g2.rabi_mhz}, {"detuning_mhz", c.g2.detuning_mhz},
               {"signal_fraction", c.g2.signal_fraction}, {"noise_sigma", c.g2.noise_sigma}};
    j["saturation"] = {{"powers_nw", c.saturation.powers_nw}, {"detection_scale", c.saturation.detection_scale},
                       {"zpl_blocked", c.saturation.zpl_blocked}, {"integration_s", c.saturation.integration_s}};
    const ScanConfig& s = c.scans.scan;
    j["scan"] = {{"scan_rate_ghz_per_s", s.scan_rate_hz_per_s / ghz},
                 {"span_ghz", s.span_hz / ghz},
                 {"n_bins", s.n_bins},
                 {"n_scans", s.n_scans},
                 {"mean_peak_counts", s.mean_peak_counts},
                 {"baseline_counts", s.baseline_counts},
                 {"noiseless", s.noiseless},
                 {"bin_oversampling", s.bin_oversampling},
                 {"fwhm_mhz", c.scans.fwhm_mhz},
                 {"threshold_sigmas", c.scans.threshold_sigmas},
                 {"min_accepted", c.scans.min_accepted}};
    j["jitter"] = {
        {"kind", c.scans.jitter.kind == JitterKind::gaussian_per_scan ? "gaussian_per_scan" : "random_walk"},
        {"sigma_mhz", c.scans.jitter.sigma_hz / mhz}};
    const ZStackFitSettings& z = c.fit.zstack;
    j["fit"] = {{"max_iterations", c.fit.lm.max_iterations},
                {"ftol", c.fit.lm.ftol},
                {"gtol", c.fit.lm.gtol},
                {"xtol", c.fit.lm.xtol},
                {"restarts", c.fit.lm.restarts},
                {"g2_fit_rabi_scale", c.fit.g2_fit_rabi_scale},
                {"weighting", c.fit.weighting == Weighting::uniform ? "uniform" : "counts"},
                {"zstack",
                 {{"auto_initialize", c.fit.auto_initialize},
                  {"z_offset_nm", z.z_offset_nm},
                  {"z_step_nm", z.z_step_nm},
                  {"fit_molecule_resonance", z.fit_molecule_resonance},
                  {"fit_molecule_width", z.fit_molecule_width},
                  {"fit_coupling", z.fit_coupling},
                  {"fit_zeta_p", z.fit_zeta_p},
                  {"fit_phase_offset", z.fit_phase_offset},
                  {"fit_rayleigh_range", z.fit_rayleigh_range},
                  {"fit_z_offset", z.fit_z_offset},
                  {"fit_z_step", z.fit_z_step},
                  {"fit_plasmon_resonance", z.fit_plasmon_resonance},
                  {"fit_plasmon_width", z.fit_plasmon_width},
                  {"fit_molecule_scatter", z.fit_molecule_scatter},
                  {"fit_molecule_drive", z.fit_molecule_drive},
                  {"per_spectrum_baseline", z.per_spectrum_baseline}}}};
    const PsfSimulation& p = c.psf.sim;
    j["psf"] = {{"center_x_nm", p.center_x_nm},
                {"center_y_nm", p.center_y_nm},
                {"total_counts", p.total_counts},
                {"background_per_pixel", p.background_per_pixel},
                {"pitch_nm", p.pitch_nm},
                {"nx", p.nx},
                {"ny", p.ny},
                {"origin_x_nm", p.origin_x_nm},
                {"origin_y_nm", p.origin_y_nm},
                {"bias_x_nm", p.bias_x_nm},
                {"bias_y_nm", p.bias_y_nm},
                {"noiseless", p.noiseless},
                {"centered", c.psf.centered},
                {"encoding", c.psf.encoding},
                {"detection_sigmas", c.psf.detection_sigmas}};
    json in = json::object();
    if (c.inputs.spectrum_csv) in["spectrum_csv"] = c.inputs.spectrum_csv->string();
    if (!c.inputs.zstack_csv.empty()) in["zstack_csv"] = paths(c.inputs.zstack_csv);
    if (!c.inputs.g2_csv.empty()) in["g2_csv"] = paths(c.inputs.g2_csv);
    if (!c.inputs.g2_rabi_mhz.empty()) in["g2_rabi_mhz"] = c.inputs.g2_rabi_mhz;
    if (!c.inputs.g2_detuning_mhz.empty()) in["g2_detuning_mhz"] = c.inputs.g2_detuning_mhz;
    if (c.inputs.scans_csv) in["scans_csv"] = c.inputs.scans_csv->string();
    if (c.inputs.saturation_csv) in["saturation_csv"] = c.inputs.saturation_csv->string();
    if (c.inputs.image_header) in["image_header"] = c.inputs.image_header->string();
    j["inputs"] = in;
    return j.dump(2);
}

}  // namespace cloaksim
