#include "cloaksim/lineshape_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cloaksim/errors.hpp"
#include "cloaksim/parallel.hpp"
#include "cloaksim/units.hpp"

namespace cloaksim {

OscillatorParams OscillatorParams::from_hz(double resonance_hz, double fwhm_hz,
                                           double drive_amplitude, double scatter_coupling,
                                           double drive_phase) {
    OscillatorParams osc;
    osc.resonance = to_angular(resonance_hz);
    osc.damping = to_angular(fwhm_hz);
    osc.drive_amplitude = drive_amplitude;
    osc.scatter_coupling = scatter_coupling;
    osc.drive_phase = drive_phase;
    return osc;
}

void OscillatorParams::validate() const {
    if (!(resonance > 0.0) || !std::isfinite(resonance)) {
        throw DomainError("oscillator resonance must be positive");
    }
    if (!(damping >= 0.0) || !std::isfinite(damping)) {
        throw DomainError("oscillator damping must be non-negative");
    }
    if (!(drive_amplitude >= 0.0) || !(scatter_coupling >= 0.0)) {
        throw DomainError("drive amplitude and scatter coupling must be non-negative");
    }
    if (!std::isfinite(drive_phase)) throw DomainError("drive phase must be finite");
}

void HybridModel::validate() const {
    plasmon.validate();
    molecule.validate();
    if (!(plasmon.damping > 0.0)) throw DomainError("plasmon damping must be positive");
    if (!std::isfinite(coupling)) throw DomainError("coupling must be finite");
    if (!(zeta_p >= 0.0 && zeta_p < 1.0)) throw DomainError("zeta_p must lie in [0, 1)");
    if (!std::isfinite(phase_offset)) throw DomainError("phase offset must be finite");
    focus.validate();
}

complex oscillator_denominator(double omega, const OscillatorParams& osc) {
    return {(osc.resonance - omega) * (osc.resonance + omega), -osc.damping * omega};
}

complex normalized_response(double omega, const OscillatorParams& osc) {
    return complex(0.0, -osc.damping * osc.resonance) / oscillator_denominator(omega, osc);
}

OscillatorAmplitudes coupled_response(double omega, const HybridModel& model) {
    const complex dp = oscillator_denominator(omega, model.plasmon);
    const complex dm = oscillator_denominator(omega, model.molecule);
    const double g = model.coupling;
    const complex det = dp * dm - g * g;
    if (!(std::abs(det) > 1e-12 * (std::abs(dp) * std::abs(dm) + g * g))) {
        throw SingularityError("coupled-oscillator determinant vanishes at omega = " +
                               std::to_string(omega));
    }
    const complex fp = model.plasmon.drive();
    const complex fm = model.molecule.drive();
    return {(fp * dm - g * fm) / det, (fm * dp - g * fp) / det};
}

complex detection_scale(const HybridModel& model) {
    const auto reference = [&](const OscillatorParams& osc) {
        return model.zeta_p * osc.damping * osc.resonance / (osc.scatter_coupling * osc.drive());
    };
    if (model.plasmon.scatter_coupling * model.plasmon.drive_amplitude > 0.0) {
        return reference(model.plasmon);
    }
    if (model.molecule.scatter_coupling * model.molecule.drive_amplitude > 0.0) {
        return reference(model.molecule);
    }
    return {0.0, 0.0};
}

namespace {

struct DetectionFactor {
    complex value;  // i a(z) e^{-i phi(z)} N
};

DetectionFactor detection_factor(const HybridModel& model, double z_nm) {
    const double phi = model.phase_offset + gouy_phase(z_nm, model.focus.rayleigh_range_nm);
    const double a = axial_envelope(z_nm, model.focus.rayleigh_range_nm);
    return {complex(0.0, 1.0) * std::polar(a, -phi) * detection_scale(model)};
}

double transmission_with(const DetectionFactor& factor, double frequency_hz,
                         const HybridModel& model) {
    const OscillatorAmplitudes x = coupled_response(to_angular(frequency_hz), model);
    const complex scattered = model.plasmon.scatter_coupling * x.plasmon +
                              model.molecule.scatter_coupling * x.molecule;
    return std::norm(1.0 + factor.value * scattered);
}

void check_grid(std::span<const double> grid_hz) {
    if (grid_hz.empty()) throw DomainError("empty frequency grid");
    if (!strictly_increasing(grid_hz)) throw DomainError("frequency grid must be strictly increasing");
}

}  // namespace

double composite_transmission_at(double frequency_hz, const HybridModel& model, double z_nm) {
    return transmission_with(detection_factor(model, z_nm), frequency_hz, model);
}

Spectrum composite_transmission(std::span<const double> grid_hz, const HybridModel& model,
                                double z_nm, unsigned threads) {
    check_grid(grid_hz);
    const DetectionFactor factor = detection_factor(model, z_nm);
    Spectrum out;
    out.kind = SpectrumKind::transmission;
    out.frequency_hz.assign(grid_hz.begin(), grid_hz.end());
    out.values.resize(grid_hz.size());
    parallel_for(grid_hz.size(), threads, [&](std::size_t i) {
        out.values[i] = transmission_with(factor, grid_hz[i], model);
    });
    return out;
}

Spectrum single_scatterer_transmission(std::span<const double> grid_hz,
                                       const OscillatorParams& params, double zeta, double z_nm,
                                       const FocusParams& focus, double phase_offset) {
    if (!(zeta >= 0.0 && zeta < 1.0)) throw DomainError("zeta must lie in [0, 1)");
    check_grid(grid_hz);
    const double phi = phase_offset + gouy_phase(z_nm, focus.rayleigh_range_nm);
    const complex factor = std::polar(zeta * axial_envelope(z_nm, focus.rayleigh_range_nm), -phi);
    Spectrum out;
    out.kind = SpectrumKind::transmission;
    out.frequency_hz.assign(grid_hz.begin(), grid_hz.end());
    out.values.resize(grid_hz.size());
    for (std::size_t i = 0; i < grid_hz.size(); ++i) {
        out.values[i] = std::norm(1.0 - factor * normalized_response(to_angular(grid_hz[i]), params));
    }
    return out;
}

Hybridization hybridized_emitter(const HybridModel& model) {
    const double wm = model.molecule.resonance;
    const double g = model.coupling;
    const complex sigma = g * g / oscillator_denominator(wm, model.plasmon);
    Hybridization h;
    h.lamb_shift_hz = to_hz(-sigma.real() / (2.0 * wm));
    h.induced_width_hz = to_hz(sigma.imag() / wm);
    h.total_width_hz = to_hz(model.molecule.damping) + h.induced_width_hz;
    h.adiabatic = model.plasmon.damping >= 10.0 * model.molecule.damping;
    return h;
}

double coupling_for_induced_width(const HybridModel& model, double induced_width_hz) {
    if (!(induced_width_hz >= 0.0)) throw DomainError("induced width must be non-negative");
    const double wm = model.molecule.resonance;
    const double im_inverse = (1.0 / oscillator_denominator(wm, model.plasmon)).imag();
    if (!(im_inverse > 0.0)) throw DomainError("plasmon response has no dissipative part");
    return std::sqrt(to_angular(induced_width_hz) * wm / im_inverse);
}

FeatureMetrics analyze_feature(const Spectrum& spectrum, const FeatureOptions& options) {
    std::size_t lo = 0;
    std::size_t hi = spectrum.size();
    if (options.window_lo_hz != 0.0 || options.window_hi_hz != 0.0) {
        const auto& f = spectrum.frequency_hz;
        lo = static_cast<std::size_t>(
            std::lower_bound(f.begin(), f.end(), options.window_lo_hz) - f.begin());
        hi = static_cast<std::size_t>(
            std::upper_bound(f.begin(), f.end(), options.window_hi_hz) - f.begin());
    }
    const std::size_t n = hi > lo ? hi - lo : 0;
    if (n < 8) throw DetectionError("feature window holds fewer than 8 points");
    std::span<const double> x(spectrum.frequency_hz.data() + lo, n);
    std::span<const double> y(spectrum.values.data() + lo, n);

    const std::size_t edge = std::max<std::size_t>(
        2, static_cast<std::size_t>(options.edge_fraction * static_cast<double>(n)));
    const double x0 = 0.5 * (x.front() + x.back());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, m = 0.0;
    const auto accumulate = [&](std::size_t i) {
        const double dx = x[i] - x0;
        sx += dx;
        sy += y[i];
        sxx += dx * dx;
        sxy += dx * y[i];
        m += 1.0;
    };
    for (std::size_t i = 0; i < edge; ++i) accumulate(i);
    for (std::size_t i = n - edge; i < n; ++i) accumulate(i);
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;

    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = y[i] - (intercept + slope * (x[i] - x0));

    FeatureMetrics out;
    double edge_ss = 0.0;
    for (std::size_t i = 0; i < edge; ++i) edge_ss += d[i] * d[i] + d[n - 1 - i] * d[n - 1 - i];
    out.noise_rms = std::sqrt(edge_ss / (2.0 * static_cast<double>(edge)));
    for (double v : d) out.contrast = std::max(out.contrast, std::abs(v));
    if (!(out.contrast > std::max(options.threshold, 5.0 * out.noise_rms))) {
        throw DetectionError("no narrow feature above the noise threshold");
    }

    double area = 0.0, moment = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = x[i + 1] - x[i];
        const double a0 = std::abs(d[i]), a1 = std::abs(d[i + 1]);
        area += 0.5 * h * (a0 + a1);
        moment += 0.5 * h * (a0 * x[i] + a1 * x[i + 1]);
    }
    const double c = moment / area;
    out.centroid_hz = c;

    double left = 0.0, right = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double xa = x[i], xb = x[i + 1];
        if (xb <= c) {
            left += 0.5 * (xb - xa) * (d[i] + d[i + 1]);
        } else if (xa >= c) {
            right += 0.5 * (xb - xa) * (d[i] + d[i + 1]);
        } else {
            const double dc = d[i] + (c - xa) / (xb - xa) * (d[i + 1] - d[i]);
            left += 0.5 * (c - xa) * (d[i] + dc);
            right += 0.5 * (xb - c) * (dc + d[i + 1]);
        }
    }
    out.asymmetry = (right - left) / area;
    return out;
}

double fano_asymmetry(const Spectrum& spectrum, const FeatureOptions& options) {
    return analyze_feature(spectrum, options).asymmetry;
}

}  // namespace cloaksim
