#include "cloaksim/cli.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cloaksim/config.hpp"
#include "cloaksim/errors.hpp"
#include "cloaksim/fit_g2.hpp"
#include "cloaksim/io.hpp"
#include "cloaksim/random.hpp"
#include "cloaksim/units.hpp"

namespace cloaksim {

namespace {

namespace fs = std::filesystem;
using io::CsvTable;
using io::format_double;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::optional<unsigned> threads;
    std::string format = "csv";
};

// Non-converged fits end the run with exit code 3 after all outputs are written.
struct Context {
    ExperimentConfig cfg;
    fs::path out;
    bool structured = false;
    unsigned threads = 1;
    std::string subcommand;
    std::vector<std::string> outputs;
    std::ostringstream report;
    std::ostringstream summary;
    bool numerical_failure = false;

    fs::path path(const std::string& name) {
        outputs.push_back(name);
        return out / name;
    }

    void table(const std::string& stem, const CsvTable& t) {
        if (!structured) {
            io::write_csv(path(stem + ".csv"), t);
            return;
        }
        nlohmann::json j;
        j["columns"] = t.header;
        j["rows"] = t.rows;
        io::write_text(path(stem + ".json"), j.dump(1) + "\n");
    }

    void fit_section(const FitResult& fit, const std::string& title) {
        report << io::format_fit_report(fit, title) << '\n';
        if (!fit.converged) numerical_failure = true;
    }

    template <class T>
    void value(const std::string& key, T v) {
        if constexpr (std::is_floating_point_v<T>) {
            summary << key << " = " << format_double(v) << '\n';
        } else {
            summary << key << " = " << v << '\n';
        }
    }
};

std::vector<double> tau_grid(const G2Config& g) { return linspace(0.0, g.tau_max_ns * ns, g.points); }

DriveParams configured_drive(const ExperimentConfig& c) {
    return {to_angular(c.drive.rabi_mhz * mhz), to_angular(c.drive.detuning_mhz * mhz)};
}

PowerCalibration calibration(const ExperimentConfig& c) {
    return {to_angular(c.drive.rabi_per_sqrt_nw_mhz * mhz)};
}

FeatureOptions feature_window(const ExperimentConfig& c, const HybridModel& m) {
    const Hybridization h = hybridized_emitter(m);
    const double center = to_hz(m.molecule.resonance) + h.lamb_shift_hz;
    FeatureOptions o;
    o.window_lo_hz = center - 0.5 * c.zstack.window_mhz * mhz;
    o.window_hi_hz = center + 0.5 * c.zstack.window_mhz * mhz;
    return o;
}

std::vector<Spectrum> synthesize_zstack(Context& ctx, const HybridModel& model, std::vector<double>& z) {
    const ExperimentConfig& c = ctx.cfg;
    z = axial_positions(c.zstack.positions, c.zstack.total_distance_nm, c.zstack.center_nm);
    ZStack stack = generate_zstack(c.spectrum_grid_hz(), model, z, ctx.threads);
    if (c.zstack.noise_counts > 0.0) {
        const double n = c.zstack.noise_counts;
        for (std::size_t k = 0; k < stack.spectra.size(); ++k) {
            Rng rng = make_rng(c.seed, "zstack", k);
            for (double& v : stack.spectra[k].values) v = draw_counts(rng, v * n) / n;
        }
    }
    return std::move(stack.spectra);
}

CsvTable spectrum_table(const Spectrum& s, const std::string& column) {
    CsvTable t;
    t.header = {"frequency_hz", column};
    for (std::size_t i = 0; i < s.size(); ++i) t.rows.push_back({s.frequency_hz[i], s.values[i]});
    return t;
}

void cmd_spectrum(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const std::vector<double> grid = c.spectrum_grid_hz();
    const double z = c.spectrum.z_nm;
    CsvTable t;
    if (c.spectrum.model == "single") {
        const HybridModel m = c.hybrid_model();
        const OscillatorParams osc = c.spectrum.scatterer == "antenna" ? m.plasmon : m.molecule;
        const double zeta = c.spectrum.zeta.value_or(c.antenna.zeta);
        const Spectrum s = single_scatterer_transmission(grid, osc, zeta, z, c.focus, m.phase_offset);
        t = spectrum_table(s, "transmission");
        ctx.value("model", "single");
        ctx.value("scatterer", c.spectrum.scatterer);
        ctx.value("zeta", zeta);
        ctx.value("resonant_dip", dip_from_zeta(zeta));
        ctx.value("min_transmission", *std::min_element(s.values.begin(), s.values.end()));
    } else {
        const HybridModel m = c.hybrid_model();
        const Spectrum s = composite_transmission(grid, m, z, ctx.threads);
        const Spectrum a = composite_transmission(grid, antenna_only(m), z, ctx.threads);
        t.header = {"frequency_hz", "transmission", "antenna_transmission"};
        for (std::size_t i = 0; i < s.size(); ++i) t.rows.push_back({grid[i], s.values[i], a.values[i]});
        const TransmissionChange ch = transmission_change(grid, m, z);
        ctx.value("model", "composite");
        ctx.value("relative_change", ch.relative_change);
        ctx.value("change_frequency_hz", ch.frequency_hz);
        ctx.value("antenna_transmission", ch.antenna_transmission);
        ctx.value("min_transmission", *std::min_element(s.values.begin(), s.values.end()));
    }
    ctx.value("z_nm", z);
    ctx.table("spectrum", t);
}

void cmd_zstack(Context& ctx) {
    const HybridModel m = ctx.cfg.hybrid_model();
    std::vector<double> z;
    const std::vector<Spectrum> stack = synthesize_zstack(ctx, m, z);
    const FeatureOptions window = feature_window(ctx.cfg, m);
    CsvTable asym;
    asym.header = {"index", "z_nm", "asymmetry", "contrast"};
    int flips = 0;
    double previous = 0.0;
    for (std::size_t k = 0; k < stack.size(); ++k) {
        ctx.table("zstack_" + std::to_string(k), spectrum_table(stack[k], "transmission"));
        const FeatureMetrics f = analyze_feature(stack[k], window);
        asym.rows.push_back({static_cast<double>(k), z[k], f.asymmetry, f.contrast});
        if (k > 0 && previous * f.asymmetry < 0.0) ++flips;
        previous = f.asymmetry;
    }
    ctx.table("zstack_asymmetry", asym);
    ctx.value("positions", stack.size());
    ctx.value("asymmetry_sign_changes", flips);
}

void cmd_g2(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const EmitterParams e = c.emitter_params();
    const std::vector<double> tau = tau_grid(c.g2);
    std::vector<double> v = g2_with_background(g2(tau, configured_drive(c), e), c.g2.signal_fraction);
    if (c.g2.noise_sigma > 0.0) {
        Rng rng = make_rng(c.seed, "g2", 0);
        std::normal_distribution<double> noise(0.0, c.g2.noise_sigma);
        for (double& x : v) x += noise(rng);
    }
    CsvTable t;
    t.header = {"tau_ns", "g2"};
    for (std::size_t i = 0; i < tau.size(); ++i) t.rows.push_back({tau[i] / ns, v[i]});
    ctx.table("g2", t);
    ctx.value("saturation_parameter", saturation_parameter(configured_drive(c).rabi, e));
    ctx.value("gamma1_mhz", to_hz(e.gamma1()) / mhz);
    ctx.value("gamma2_mhz", to_hz(e.gamma2()) / mhz);
}

void cmd_saturation(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const SaturationConfig& s = c.saturation;
    const EmitterParams e = c.emitter_params();
    const DetectionParams det{s.detection_scale, s.zpl_blocked};
    const PowerCalibration cal = calibration(c);
    std::vector<double> rates;
    if (c.inputs.saturation_csv) {
        const CsvTable in = io::read_csv(*c.inputs.saturation_csv);
        if (in.header.size() < 2) throw IoError("saturation input needs power_nw and rate_cps columns");
        std::vector<double> powers;
        for (const auto& row : in.rows) {
            powers.push_back(row[0]);
            rates.push_back(row[1]);
        }
        ctx.cfg.saturation.powers_nw = powers;
    } else {
        rates = saturation_curve(s.powers_nw, e, cal, det);
        if (s.integration_s > 0.0) {
            Rng rng = make_rng(c.seed, "saturation", 0);
            for (double& r : rates) r = draw_counts(rng, r * s.integration_s) / s.integration_s;
        }
    }
    const std::vector<double>& powers = ctx.cfg.saturation.powers_nw;
    CsvTable t;
    t.header = {"power_nw", "rate_cps"};
    for (std::size_t i = 0; i < powers.size(); ++i) t.rows.push_back({powers[i], rates[i]});
    ctx.table("saturation", t);
    const FitResult fit = fit_saturation(powers, rates, Weighting::counts, c.fit.lm);
    ctx.fit_section(fit, "saturation");
    const double k = cal.rabi_per_sqrt_power;
    ctx.value("model_saturated_rate_cps", saturated_rate(e, det));
    ctx.value("model_saturation_power_nw", e.gamma1() * e.gamma2() / (k * k));
}

ScanSet make_scans(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    if (c.inputs.scans_csv) return io::read_scanset_csv(*c.inputs.scans_csv);
    return simulate_scan_set(c.scans.scan, c.scans.jitter, lorentzian_lineshape(c.scans.fwhm_mhz * mhz), c.seed,
                             ctx.threads);
}

void cmd_scans(Context& ctx) {
    const ScanSet set = make_scans(ctx);
    ctx.outputs.push_back("scans.csv");
    ctx.outputs.push_back("scans_meta.json");
    io::write_scanset(ctx.out / "scans.csv", ctx.out / "scans_meta.json", set);
    ctx.value("scans", set.scans.size());
    ctx.value("dwell_time_s", set.config.dwell_time_s());
}

CsvTable averaged_table(const AveragedSpectrum& a) {
    CsvTable t;
    t.header = {"frequency_hz", "mean_counts"};
    for (std::size_t i = 0; i < a.frequency_hz.size(); ++i) t.rows.push_back({a.frequency_hz[i], a.mean_counts[i]});
    return t;
}

void cmd_align(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const ScanSet set = make_scans(ctx);
    MidpointOptions mo;
    mo.fwhm_hint_hz = c.scans.fwhm_mhz * mhz;
    mo.threshold_sigmas = c.scans.threshold_sigmas;
    const auto [aligned, diag] = align_and_average(set, mo, c.scans.min_accepted, ctx.threads);
    const AveragedSpectrum naive = naive_average(set);
    ctx.table("aligned", averaged_table(aligned));
    ctx.table("naive", averaged_table(naive));
    const FitResult fa = fit_lorentzian(aligned.to_spectrum(), {}, Weighting::counts, c.fit.lm);
    const FitResult fn = fit_lorentzian(naive.to_spectrum(), {}, Weighting::counts, c.fit.lm);
    ctx.fit_section(fa, "aligned");
    ctx.fit_section(fn, "naive");
    ctx.value("accepted_scans", diag.accepted);
    ctx.value("rejected_scans", diag.rejected);
    ctx.value("midpoint_scatter_hz", diag.midpoint_scatter_hz);
    ctx.value("dropped_edge_bins", diag.dropped_edge_bins);
    ctx.value("aligned_fwhm_hz", fa.parameter("fwhm_hz"));
    ctx.value("naive_fwhm_hz", fn.parameter("fwhm_hz"));
    ctx.value("naive_to_aligned_width_ratio", fn.parameter("fwhm_hz") / fa.parameter("fwhm_hz"));
}

void cmd_fit_lorentzian(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    Spectrum s;
    Weighting w = c.fit.weighting;
    if (c.inputs.spectrum_csv) {
        s = io::read_spectrum_csv(*c.inputs.spectrum_csv, SpectrumKind::fluorescence);
    } else {
        ScanConfig one = c.scans.scan;
        one.n_scans = 1;
        const ScanSet set = simulate_scan_set(one, {}, lorentzian_lineshape(c.scans.fwhm_mhz * mhz), c.seed);
        s = Spectrum{set.scans[0].frequency_hz, set.scans[0].counts, SpectrumKind::fluorescence};
        w = Weighting::counts;
    }
    const FitResult fit = fit_lorentzian(s, {}, w, c.fit.lm);
    ctx.fit_section(fit, "lorentzian");
    CsvTable t;
    t.header = {"frequency_hz", "data", "model"};
    for (std::size_t i = 0; i < s.size(); ++i) {
        t.rows.push_back({s.frequency_hz[i], s.values[i],
                          lorentzian(s.frequency_hz[i], fit.parameters[0], fit.parameters[1], fit.parameters[2],
                                     fit.parameters[3])});
    }
    ctx.table("fit", t);
}

void cmd_fit_zstack(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const HybridModel base = c.hybrid_model();
    std::vector<Spectrum> stack;
    if (!c.inputs.zstack_csv.empty()) {
        for (const fs::path& p : c.inputs.zstack_csv) stack.push_back(io::read_spectrum_csv(p));
    } else {
        std::vector<double> z;
        stack = synthesize_zstack(ctx, base, z);
        ctx.cfg.fit.zstack.z_offset_nm = z.front();
        if (z.size() > 1) ctx.cfg.fit.zstack.z_step_nm = z[1] - z[0];
    }
    ZStackFitSettings settings = ctx.cfg.fit.zstack;
    settings.initial = base;
    settings.weighting = c.fit.weighting;
    if (c.fit.auto_initialize) settings = guess_zstack(stack, settings);
    const ZStackFit fit = fit_zstack(stack, settings, c.fit.lm);
    ctx.fit_section(fit.fit, "zstack");

    const HybridModel& m = fit.model;
    const Hybridization h = hybridized_emitter(m);
    ctx.value("lamb_shift_mhz", h.lamb_shift_hz / mhz);
    ctx.value("induced_width_mhz", h.induced_width_hz / mhz);
    ctx.value("molecule_fwhm_mhz", to_hz(m.molecule.damping) / mhz);
    ctx.value("coupling_rad2_per_s2", m.coupling);
    ctx.value("zeta_p", m.zeta_p);
    ctx.value("phase_offset_rad", m.phase_offset);
    ctx.value("rayleigh_range_nm", m.focus.rayleigh_range_nm);
    ctx.value("z_offset_nm", fit.z_offset_nm);
    ctx.value("z_step_nm", fit.z_step_nm);
    const double z_focus = 0.0;
    ctx.value("on_focus_relative_change", transmission_change(stack.front().frequency_hz, m, z_focus).relative_change);
    for (std::size_t k = 0; k < stack.size(); ++k) {
        const double z = fit.z_offset_nm + static_cast<double>(k) * fit.z_step_nm;
        const Spectrum model = composite_transmission(stack[k].frequency_hz, m, z);
        CsvTable t;
        t.header = {"frequency_hz", "data", "model"};
        for (std::size_t i = 0; i < model.size(); ++i) {
            t.rows.push_back({stack[k].frequency_hz[i], stack[k].values[i], model.values[i]});
        }
        ctx.table("zstack_fit_" + std::to_string(k), t);
        ctx.value("rss_" + std::to_string(k), fit.spectrum_rss[k]);
    }
}

void cmd_fit_g2(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const EmitterParams e = c.emitter_params();
    const auto pick = [&](const std::vector<double>& per_trace, std::size_t k) {
        return per_trace.empty() ? c.drive.detuning_mhz : per_trace[k];
    };
    std::vector<G2Dataset> data;
    if (!c.inputs.g2_csv.empty()) {
        for (std::size_t k = 0; k < c.inputs.g2_csv.size(); ++k) {
            const CsvTable t = io::read_csv(c.inputs.g2_csv[k]);
            G2Dataset d;
            for (const auto& row : t.rows) {
                if (row.size() < 2) throw IoError("g2 input needs tau_ns and g2 columns");
                d.tau_s.push_back(row[0] * ns);
                d.g2.push_back(row[1]);
            }
            d.rabi = to_angular(c.inputs.g2_rabi_mhz[k] * mhz);
            d.detuning = to_angular(pick(c.inputs.g2_detuning_mhz, k) * mhz);
            data.push_back(std::move(d));
        }
    } else {
        const std::vector<double> tau = tau_grid(c.g2);
        for (std::size_t k = 0; k < c.g2.rabi_mhz.size(); ++k) {
            G2Dataset d;
            d.tau_s = tau;
            d.rabi = to_angular(c.g2.rabi_mhz[k] * mhz);
            d.detuning = to_angular(pick(c.g2.detuning_mhz, k) * mhz);
            d.g2 = g2_with_background(g2(tau, {d.rabi, d.detuning}, e), c.g2.signal_fraction);
            if (c.g2.noise_sigma > 0.0) {
                Rng rng = make_rng(c.seed, "g2", k);
                std::normal_distribution<double> noise(0.0, c.g2.noise_sigma);
                for (double& x : d.g2) x += noise(rng);
            }
            data.push_back(std::move(d));
        }
    }
    G2FitSettings settings;
    settings.initial = e;
    settings.signal_fraction = c.g2.signal_fraction;
    settings.fit_rabi_scale = c.fit.g2_fit_rabi_scale;
    const G2Fit fit = fit_g2(data, settings, c.fit.lm);
    ctx.fit_section(fit.fit, "g2");
    ctx.value("lifetime_ns", fit.emitter.lifetime_s() / ns);
    ctx.value("gamma1_mhz", to_hz(fit.emitter.gamma1()) / mhz);
    ctx.value("pure_dephasing_mhz", to_hz(fit.emitter.pure_dephasing) / mhz);
    ctx.value("signal_fraction", fit.signal_fraction);
    ctx.value("rabi_scale", fit.rabi_scale);
    for (std::size_t k = 0; k < data.size(); ++k) {
        const std::vector<double> model =
            g2_with_background(g2(data[k].tau_s, {fit.rabi[k], data[k].detuning}, fit.emitter), fit.signal_fraction);
        CsvTable t;
        t.header = {"tau_ns", "g2", "model"};
        for (std::size_t i = 0; i < model.size(); ++i) t.rows.push_back({data[k].tau_s[i] / ns, data[k].g2[i], model[i]});
        ctx.table("g2_fit_" + std::to_string(k), t);
        ctx.value("rabi_mhz_" + std::to_string(k), to_hz(fit.rabi[k]) / mhz);
    }
}

PsfSimulation psf_settings(const ExperimentConfig& c) {
    PsfSimulation s = c.psf.sim;
    if (c.psf.centered) {
        const PsfSimulation frame = centered_frame(s.center_x_nm, s.center_y_nm, s.pitch_nm, s.nx, s.ny);
        s.origin_x_nm = frame.origin_x_nm;
        s.origin_y_nm = frame.origin_y_nm;
    }
    return s;
}

void cmd_psf_sim(Context& ctx) {
    const RasterImage img = simulate_psf_image(psf_settings(ctx.cfg), ctx.cfg.focus, ctx.cfg.seed);
    const bool binary = ctx.cfg.psf.encoding == "binary";
    ctx.outputs.push_back("image.json");
    ctx.outputs.push_back(binary ? "image.bin" : "image.csv");
    io::write_image(ctx.out / "image.json", img, binary ? io::ImageEncoding::binary : io::ImageEncoding::csv);
    ctx.value("image_sum", img.sum());
    ctx.value("psf_sigma_nm", psf_sigma_nm(ctx.cfg.focus.focal_fwhm_nm));
}

void cmd_localize(Context& ctx) {
    const ExperimentConfig& c = ctx.cfg;
    const RasterImage img = c.inputs.image_header ? io::read_image(*c.inputs.image_header)
                                                  : simulate_psf_image(psf_settings(c), c.focus, c.seed);
    LocalizationOptions opt;
    opt.detection_sigmas = c.psf.detection_sigmas;
    opt.lm = c.fit.lm;
    const Localization loc = localize_psf(img, opt);
    ctx.fit_section(loc.fit, "localization");
    ctx.value("x_nm", loc.x_nm);
    ctx.value("y_nm", loc.y_nm);
    ctx.value("precision_nm", loc.precision_nm());
    ctx.value("sigma_nm", loc.sigma_nm);
    ctx.value("signal_counts", loc.signal_counts);
    ctx.value("sigma_over_sqrt_n_nm", localization_precision(loc.sigma_nm, loc.signal_counts));
}

void cmd_hybridize(Context& ctx) {
    const HybridModel m = ctx.cfg.hybrid_model();
    const Hybridization h = hybridized_emitter(m);
    ctx.value("coupling_rad2_per_s2", m.coupling);
    ctx.value("lamb_shift_mhz", h.lamb_shift_hz / mhz);
    ctx.value("induced_width_mhz", h.induced_width_hz / mhz);
    ctx.value("total_width_mhz", h.total_width_hz / mhz);
    ctx.value("adiabatic", h.adiabatic ? "true" : "false");
}

void write_manifest(Context& ctx, const std::string& status) {
    std::ostringstream m;
    m << "toolkit = cloaksim\n";
    m << "version = " << CLOAKSIM_VERSION << '\n';
    m << "subcommand = " << ctx.subcommand << '\n';
    m << "seed = " << ctx.cfg.seed << '\n';
    m << "format = " << (ctx.structured ? "structured" : "csv") << '\n';
    m << "status = " << status << '\n';
    for (const std::string& o : ctx.outputs) m << "output = " << o << '\n';
    m << "[config]\n" << config_to_json(ctx.cfg) << '\n';
    io::write_text(ctx.out / "manifest.txt", m.str());
}

const std::map<std::string, std::pair<std::string, std::function<void(Context&)>>>& commands() {
    static const std::map<std::string, std::pair<std::string, std::function<void(Context&)>>> table{
        {"spectrum", {"transmission spectrum of the hybrid or a single scatterer", cmd_spectrum}},
        {"zstack", {"spectra across the focus with the asymmetry table", cmd_zstack}},
        {"g2", {"intensity autocorrelation at the configured drive", cmd_g2}},
        {"saturation", {"detected rate versus excitation power, with fit", cmd_saturation}},
        {"scans", {"generate a set of fast frequency scans", cmd_scans}},
        {"align", {"midpoint-aligned and naive averages of a scan set", cmd_align}},
        {"fit-lorentzian", {"Lorentzian fit of a spectrum", cmd_fit_lorentzian}},
        {"fit-zstack", {"global coupled-oscillator fit of a z-stack", cmd_fit_zstack}},
        {"fit-g2", {"joint g2 fit over several drive strengths", cmd_fit_g2}},
        {"psf-sim", {"simulate a PSF raster image", cmd_psf_sim}},
        {"localize", {"2D Gaussian localization of a PSF image", cmd_localize}},
        {"hybridize", {"Lamb shift and induced width of the hybrid", cmd_hybridize}},
    };
    return table;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coherent extinction and emitter-antenna simulation toolkit", "cloaksim"};
    app.set_version_flag("--version", std::string(CLOAKSIM_VERSION));
    app.require_subcommand(1);
    Flags flags;
    std::string selected;
    for (const auto& [name, entry] : commands()) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", flags.config, "JSON configuration file");
        sub->add_option("--seed", flags.seed, "root seed (overrides the config)");
        sub->add_option("--out", flags.out, "output directory")->capture_default_str();
        sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--format", flags.format, "table format")
            ->check(CLI::IsMember({"csv", "structured"}))
            ->capture_default_str();
        sub->callback([&selected, n = name] { selected = n; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    Context ctx;
    ctx.subcommand = selected;
    ctx.out = flags.out;
    ctx.structured = flags.format == "structured";
    bool have_config = false;
    try {
        ctx.cfg = flags.config.empty() ? parse_config("{}") : load_config(flags.config);
        if (flags.seed) ctx.cfg.seed = *flags.seed;
        ctx.threads = flags.threads.value_or(ctx.cfg.threads);
        have_config = true;
        std::error_code ec;
        fs::create_directories(ctx.out, ec);
        if (ec) throw IoError("cannot create output directory " + ctx.out.string());
        commands().at(selected).second(ctx);
        if (!ctx.report.str().empty()) io::write_text(ctx.path("fit_report.txt"), ctx.report.str());
        if (!ctx.summary.str().empty()) io::write_text(ctx.path("summary.txt"), ctx.summary.str());
        out << ctx.summary.str();
        if (ctx.numerical_failure) {
            err << "cloaksim: fit did not converge; see fit_report.txt\n";
            write_manifest(ctx, "not converged");
            return exit_numerical;
        }
        write_manifest(ctx, "ok");
        return exit_ok;
    } catch (const ConfigError& e) {
        err << "cloaksim: configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const IoError& e) {
        err << "cloaksim: I/O error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "cloaksim: numerical error: " << e.what() << '\n';
        if (have_config) {
            try {
                ctx.report << "error = " << e.what() << '\n';
                io::write_text(ctx.path("fit_report.txt"), ctx.report.str());
                write_manifest(ctx, std::string("error: ") + e.what());
            } catch (const std::exception&) {
                return exit_io;
            }
        }
        return exit_numerical;
    }
}

}  // namespace cloaksim
