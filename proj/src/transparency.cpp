#include "cloaksim/transparency.hpp"

#include <cmath>
#include <numbers>

#include "cloaksim/errors.hpp"
#include "cloaksim/parallel.hpp"
#include "cloaksim/units.hpp"

namespace cloaksim {

std::vector<double> axial_positions(std::size_t n, double total_distance_nm, double center_nm) {
    if (n == 0) throw DomainError("need at least one axial position");
    if (n == 1) return {center_nm};
    return linspace(center_nm - 0.5 * total_distance_nm, center_nm + 0.5 * total_distance_nm, n);
}

ZStack generate_zstack(std::span<const double> grid_hz, const HybridModel& model,
                       std::span<const double> z_nm, unsigned threads) {
    ZStack stack;
    stack.z_nm.assign(z_nm.begin(), z_nm.end());
    stack.spectra.resize(z_nm.size());
    parallel_for(z_nm.size(), threads, [&](std::size_t k) {
        stack.spectra[k] = composite_transmission(grid_hz, model, z_nm[k]);
    });
    return stack;
}

HybridModel antenna_only(const HybridModel& model) {
    HybridModel bare = model;
    bare.coupling = 0.0;
    bare.molecule.scatter_coupling = 0.0;
    bare.molecule.drive_amplitude = 0.0;
    return bare;
}

TransmissionChange transmission_change(std::span<const double> grid_hz, const HybridModel& model,
                                       double z_nm) {
    const Spectrum full = composite_transmission(grid_hz, model, z_nm);
    const Spectrum bare = composite_transmission(grid_hz, antenna_only(model), z_nm);
    TransmissionChange best;
    for (std::size_t i = 0; i < grid_hz.size(); ++i) {
        const double change = full.values[i] / bare.values[i] - 1.0;
        if (std::abs(change) > std::abs(best.relative_change)) {
            best.relative_change = change;
            best.frequency_hz = grid_hz[i];
            best.antenna_transmission = bare.values[i];
        }
    }
    return best;
}

HybridModel design_transparency_model(const TransparencyObservables& obs, double plasmon_fwhm_hz,
                                      const FocusParams& focus, double phase_offset) {
    if (!(obs.induced_width_hz > 0.0 && obs.induced_width_hz < obs.feature_fwhm_hz)) {
        throw DomainError("induced width must be positive and below the feature FWHM");
    }
    if (!(plasmon_fwhm_hz > 0.0)) throw DomainError("plasmon linewidth must be positive");
    if (!(obs.transmission_increase > 0.0)) {
        throw DomainError("transparency design needs a positive transmission increase");
    }

    const double wm = to_angular(obs.feature_center_hz - obs.lamb_shift_hz);
    const double gp = to_angular(plasmon_fwhm_hz);
    // Lamb shift / induced width = (w_m^2 - w_p^2) / (2 gamma_p w_m) fixes the plasmon.
    const double ratio = obs.lamb_shift_hz / obs.induced_width_hz;
    const double wp2 = wm * wm - 2.0 * ratio * gp * wm;
    if (!(wp2 > 0.0)) throw DomainError("Lamb shift too large for this plasmon linewidth");

    HybridModel model;
    model.plasmon.resonance = std::sqrt(wp2);
    model.plasmon.damping = gp;
    model.molecule.resonance = wm;
    model.molecule.damping = to_angular(obs.feature_fwhm_hz - obs.induced_width_hz);
    model.molecule.drive_amplitude = 0.0;
    model.molecule.scatter_coupling = 0.0;
    model.phase_offset = phase_offset;
    model.focus = focus;
    model.coupling = coupling_for_induced_width(model, obs.induced_width_hz);

    const std::vector<double> grid = linspace(obs.feature_center_hz - 5.0 * obs.feature_fwhm_hz,
                                              obs.feature_center_hz + 5.0 * obs.feature_fwhm_hz,
                                              2001);
    const auto mismatch = [&](double zeta) {
        model.zeta_p = zeta;
        return transmission_change(grid, model, 0.0).relative_change - obs.transmission_increase;
    };
    const auto solve_zeta = [&] {
        double lo = 1e-6, hi = 0.999;
        double f_lo = mismatch(lo);
        const double f_hi = mismatch(hi);
        if (f_lo * f_hi > 0.0) {
            throw DomainError("no antenna extinction reproduces the requested transmission increase");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = mismatch(mid);
            if ((f_mid < 0.0) == (f_lo < 0.0)) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        model.zeta_p = 0.5 * (lo + hi);
    };

    if (!obs.symmetric_on_focus) {
        solve_zeta();
        model.validate();
        return model;
    }
    model.phase_offset = 0.0;
    for (int it = 0; it < 50; ++it) {
        solve_zeta();
        const double before = model.phase_offset;
        model.phase_offset = symmetric_phase_offset(model, true);
        if (std::abs(model.phase_offset - before) < 1e-12) break;
    }
    solve_zeta();
    model.validate();
    return model;
}

double symmetric_phase_offset(const HybridModel& model, bool peak) {
    model.validate();
    // Near the molecular line D_p is constant and both amplitudes split into a
    // broad part plus (coefficient) * i L(w) / (w gamma), with L the hybridized
    // Lorentzian; T then carries 2 Re(conj(E_0) A coefficient i L).
    const double w = model.molecule.resonance;
    const complex dp = oscillator_denominator(w, model.plasmon);
    const double g = model.coupling;
    const complex fp = model.plasmon.drive(), fm = model.molecule.drive();
    const complex xp0 = fp / dp;
    const complex sigma = g / dp;
    const complex narrow = complex(0.0, 1.0) * (model.plasmon.scatter_coupling * (xp0 * sigma - g * fm / dp) +
                                                model.molecule.scatter_coupling * (fm - g * xp0));
    const complex background = model.plasmon.scatter_coupling * xp0;
    const complex n = detection_scale(model);
    double phi = model.phase_offset;
    for (int it = 0; it < 100; ++it) {
        const complex a = complex(0.0, 1.0) * std::polar(1.0, -phi) * n;
        const complex c = std::conj(1.0 + a * background) * a * narrow;
        const double err = std::arg(peak ? c : -c);
        phi += err;
        if (std::abs(err) < 1e-15) break;
    }
    return std::remainder(phi, 2.0 * std::numbers::pi);
}

}  // namespace cloaksim
