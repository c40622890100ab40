#include "cloaksim/fit_zstack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cloaksim/errors.hpp"
#include "cloaksim/units.hpp"

namespace cloaksim {

namespace {

enum class Slot {
    molecule_offset,
    molecule_width,
    coupling,
    zeta_p,
    phase_offset,
    rayleigh_range,
    z_offset,
    z_step,
    plasmon_offset,
    plasmon_width,
    molecule_scatter,
    molecule_drive,
    baseline,
    tilt,
};

struct ParamSlot {
    Slot slot;
    std::size_t spectrum = 0;  // baseline/tilt only
};

constexpr double inf = std::numeric_limits<double>::infinity();

}  // namespace

ZStackProblem make_zstack_problem(std::span<const Spectrum> stack, const ZStackFitSettings& s) {
    if (stack.size() < 3) throw DomainError("z-stack fit needs at least three spectra");
    if (s.z_step_nm == 0.0) throw DomainError("z-stack positions must be distinct");
    const HybridModel& m0 = s.initial;
    m0.validate();

    const double nu_m_ref = to_hz(m0.molecule.resonance);
    const double nu_p_ref = to_hz(m0.plasmon.resonance);
    const double width_m = to_hz(m0.molecule.damping);
    const double width_p = to_hz(m0.plasmon.damping);
    const double kappa_p = m0.plasmon.scatter_coupling;
    const double drive_p = m0.plasmon.drive_amplitude;
    double nu_ref = 0.0;
    for (const Spectrum& sp : stack) {
        sp.validate();
        nu_ref += 0.5 * (sp.frequency_hz.front() + sp.frequency_hz.back());
    }
    nu_ref /= static_cast<double>(stack.size());

    std::vector<ParamSlot> slots;
    ZStackProblem out;
    FitProblem& p = out.problem;
    const auto add = [&](Slot slot, const std::string& name, double value, ParamTransform t,
                         double scale, double lo = -inf, double hi = inf, std::size_t k = 0) {
        if (t == ParamTransform::log && !(value > 0.0)) {
            throw DomainError("starting value of " + name + " must be positive");
        }
        slots.push_back({slot, k});
        p.names.push_back(name);
        p.initial.push_back(value);
        p.transforms.push_back(t);
        p.scales.push_back(scale);
        p.lower.push_back(lo);
        p.upper.push_back(hi);
    };
    const double zr = m0.focus.rayleigh_range_nm;
    if (s.fit_molecule_resonance) {
        // Offsets ride on absolute optical frequencies; the difference step must stay
        // well above their rounding.
        add(Slot::molecule_offset, "molecule_offset_hz", 0.0, ParamTransform::identity,
            std::sqrt(std::abs(nu_m_ref) * std::max(width_m, 1e6)));
    }
    if (s.fit_molecule_width) {
        add(Slot::molecule_width, "molecule_fwhm_hz", width_m, ParamTransform::log, 1.0);
    }
    if (s.fit_coupling) add(Slot::coupling, "coupling", m0.coupling, ParamTransform::log, 1.0);
    if (s.fit_zeta_p) add(Slot::zeta_p, "zeta_p", m0.zeta_p, ParamTransform::identity, 0.1, 0.0, 0.999);
    if (s.fit_phase_offset) {
        add(Slot::phase_offset, "phase_offset_rad", m0.phase_offset, ParamTransform::identity, 1.0);
    }
    if (s.fit_rayleigh_range) add(Slot::rayleigh_range, "rayleigh_range_nm", zr, ParamTransform::log, 1.0);
    if (s.fit_z_offset) {
        add(Slot::z_offset, "z_offset_nm", s.z_offset_nm, ParamTransform::identity, zr);
    }
    if (s.fit_z_step) {
        add(Slot::z_step, "z_step_nm", s.z_step_nm, ParamTransform::identity, std::abs(s.z_step_nm));
    }
    if (s.fit_plasmon_resonance) {
        add(Slot::plasmon_offset, "plasmon_offset_hz", 0.0, ParamTransform::identity,
            std::max(width_p, std::sqrt(std::abs(nu_p_ref) * width_p)));
    }
    if (s.fit_plasmon_width) add(Slot::plasmon_width, "plasmon_fwhm_hz", width_p, ParamTransform::log, 1.0);
    if (s.fit_molecule_scatter) {
        add(Slot::molecule_scatter, "molecule_scatter_ratio", m0.molecule.scatter_coupling / kappa_p,
            ParamTransform::identity, 1.0, 0.0);
    }
    if (s.fit_molecule_drive) {
        add(Slot::molecule_drive, "molecule_drive_ratio", m0.molecule.drive_amplitude / drive_p,
            ParamTransform::identity, 1.0, 0.0);
    }
    if (s.per_spectrum_baseline) {
        for (std::size_t k = 0; k < stack.size(); ++k) {
            add(Slot::baseline, "baseline_" + std::to_string(k), 1.0, ParamTransform::identity, 1.0, 0.0, inf, k);
            add(Slot::tilt, "tilt_per_ghz_" + std::to_string(k), 0.0, ParamTransform::identity, 1.0, -inf, inf, k);
        }
    }

    struct Unpacked {
        ZStackFit fit;
        std::vector<double> b0, b1;
    };
    const ZStackFitSettings settings = s;
    const std::size_t n_spectra = stack.size();
    const auto unpack_full = [=](std::span<const double> q) {
        Unpacked u;
        u.fit.model = settings.initial;
        u.fit.z_offset_nm = settings.z_offset_nm;
        u.fit.z_step_nm = settings.z_step_nm;
        u.b0.assign(n_spectra, 1.0);
        u.b1.assign(n_spectra, 0.0);
        HybridModel& m = u.fit.model;
        for (std::size_t j = 0; j < slots.size(); ++j) {
            const double v = q[j];
            switch (slots[j].slot) {
                case Slot::molecule_offset: m.molecule.resonance = to_angular(nu_m_ref + v); break;
                case Slot::molecule_width: m.molecule.damping = to_angular(v); break;
                case Slot::coupling: m.coupling = v; break;
                case Slot::zeta_p: m.zeta_p = v; break;
                case Slot::phase_offset: m.phase_offset = v; break;
                case Slot::rayleigh_range: m.focus.rayleigh_range_nm = v; break;
                case Slot::z_offset: u.fit.z_offset_nm = v; break;
                case Slot::z_step: u.fit.z_step_nm = v; break;
                case Slot::plasmon_offset: m.plasmon.resonance = to_angular(nu_p_ref + v); break;
                case Slot::plasmon_width: m.plasmon.damping = to_angular(v); break;
                case Slot::molecule_scatter: m.molecule.scatter_coupling = v * kappa_p; break;
                case Slot::molecule_drive: m.molecule.drive_amplitude = v * drive_p; break;
                case Slot::baseline: u.b0[slots[j].spectrum] = v; break;
                case Slot::tilt: u.b1[slots[j].spectrum] = v; break;
            }
        }
        return u;
    };

    std::vector<Spectrum> data(stack.begin(), stack.end());
    p.residuals = [=](std::span<const double> q) {
        const Unpacked u = unpack_full(q);
        std::vector<double> r;
        for (std::size_t k = 0; k < data.size(); ++k) {
            const double z = u.fit.z_offset_nm + static_cast<double>(k) * u.fit.z_step_nm;
            try {
                const Spectrum model = composite_transmission(data[k].frequency_hz, u.fit.model, z);
                for (std::size_t i = 0; i < model.size(); ++i) {
                    const double shape = u.b0[k] + u.b1[k] * (data[k].frequency_hz[i] - nu_ref) / ghz;
                    r.push_back(model.values[i] * shape - data[k].values[i]);
                }
            } catch (const Error&) {
                r.assign(r.size() + data[k].size(), std::numeric_limits<double>::quiet_NaN());
            }
        }
        return r;
    };
    std::vector<double> all_values;
    for (const Spectrum& sp : stack) all_values.insert(all_values.end(), sp.values.begin(), sp.values.end());
    p.weights = make_weights(all_values, s.weighting);
    out.unpack = [unpack_full](std::span<const double> q) { return unpack_full(q).fit; };
    return out;
}

ZStackFit fit_zstack(std::span<const Spectrum> stack, const ZStackFitSettings& settings,
                     const LmOptions& options) {
    ZStackProblem zp = make_zstack_problem(stack, settings);
    FitResult fit = lm_minimize(zp.problem, options);
    ZStackFit out = zp.unpack(fit.parameters);
    std::size_t offset = 0;
    for (const Spectrum& sp : stack) {
        double ss = 0.0;
        for (std::size_t i = 0; i < sp.size(); ++i) ss += fit.residuals[offset + i] * fit.residuals[offset + i];
        out.spectrum_rss.push_back(ss);
        offset += sp.size();
    }
    out.fit = std::move(fit);
    return out;
}

ZStackFitSettings guess_zstack(std::span<const Spectrum> stack, const ZStackFitSettings& base) {
    if (stack.size() < 3) throw DomainError("z-stack fit needs at least three spectra");
    std::size_t strongest = 0;
    double best_contrast = -1.0;
    for (std::size_t k = 0; k < stack.size(); ++k) {
        try {
            const FeatureMetrics fm = analyze_feature(stack[k]);
            if (fm.contrast > best_contrast) {
                best_contrast = fm.contrast;
                strongest = k;
            }
        } catch (const DetectionError&) {
        }
    }
    if (best_contrast < 0.0) throw DetectionError("no spectrum in the stack shows a feature");

    const FitResult line = fit_lorentzian(stack[strongest]);
    const double center = line.parameter("center_hz");
    const double width = line.parameter("fwhm_hz");

    double deepest = std::numeric_limits<double>::infinity();
    for (const Spectrum& sp : stack) {
        const std::size_t edge = std::max<std::size_t>(2, sp.size() / 10);
        double level = 0.0;
        for (std::size_t i = 0; i < edge; ++i) level += sp.values[i] + sp.values[sp.size() - 1 - i];
        deepest = std::min(deepest, level / static_cast<double>(2 * edge));
    }

    ZStackFitSettings s = base;
    HybridModel& m = s.initial;
    m.zeta_p = std::clamp(1.0 - std::sqrt(std::clamp(deepest, 0.0, 1.0)), 0.01, 0.9);
    m.molecule.damping = to_angular(0.7 * width);
    m.molecule.resonance = to_angular(center);
    if (s.fit_coupling || m.coupling > 0.0) {
        for (int it = 0; it < 3; ++it) {
            m.coupling = coupling_for_induced_width(m, 0.3 * width);
            m.molecule.resonance = to_angular(center - hybridized_emitter(m).lamb_shift_hz);
        }
    }
    s.z_offset_nm = -static_cast<double>(strongest) * s.z_step_nm;

    double best_cost = std::numeric_limits<double>::infinity();
    double best_phase = m.phase_offset;
    for (int i = 0; i < 8; ++i) {
        ZStackFitSettings trial = s;
        trial.initial.phase_offset = -std::numbers::pi + std::numbers::pi * i / 4.0;
        const ZStackProblem zp = make_zstack_problem(stack, trial);
        const std::vector<double> r = zp.problem.residuals(zp.problem.initial);
        double cost = 0.0;
        for (double v : r) cost += v * v;
        if (cost < best_cost) {
            best_cost = cost;
            best_phase = trial.initial.phase_offset;
        }
    }
    m.phase_offset = best_phase;
    return s;
}

}  // namespace cloaksim
