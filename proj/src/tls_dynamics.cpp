#include "cloaksim/tls_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cloaksim/errors.hpp"
#include "cloaksim/units.hpp"

namespace cloaksim {

EmitterParams EmitterParams::from_lifetime(double t1_s, double pure_dephasing_hz,
                                           double resonance_hz, double branching_ratio) {
    if (!(t1_s > 0.0)) throw DomainError("lifetime must be positive");
    EmitterParams e;
    e.resonance_hz = resonance_hz;
    e.radiative_rate = 1.0 / t1_s;
    e.pure_dephasing = to_angular(pure_dephasing_hz);
    e.branching_ratio = branching_ratio;
    e.validate();
    return e;
}

void EmitterParams::validate() const {
    if (!(radiative_rate >= 0.0) || !(nonradiative_rate >= 0.0)) {
        throw DomainError("decay rates must be non-negative");
    }
    if (!(gamma1() > 0.0) || !std::isfinite(gamma1())) {
        throw DomainError("total decay rate must be positive");
    }
    if (!(pure_dephasing >= 0.0) || !std::isfinite(pure_dephasing)) {
        throw DomainError("pure dephasing rate must be non-negative");
    }
    if (!(branching_ratio > 0.0 && branching_ratio <= 1.0)) {
        throw DomainError("branching ratio must lie in (0, 1]");
    }
}

double linewidth_from_lifetime(double t1_s) {
    if (!(t1_s > 0.0)) throw DomainError("lifetime must be positive");
    return 1.0 / (two_pi * t1_s);
}

double total_fwhm(double gamma1, double pure_dephasing) {
    if (!(gamma1 >= 0.0) || !(pure_dephasing >= 0.0)) {
        throw DomainError("rates must be non-negative");
    }
    return (gamma1 + 2.0 * pure_dephasing) / two_pi;
}

double pure_dephasing_from_widths(double fwhm_hz, double lifetime_width_hz) {
    if (!(fwhm_hz >= lifetime_width_hz) || !(lifetime_width_hz > 0.0)) {
        throw DomainError("measured width must not undercut the lifetime limit");
    }
    return 0.5 * (fwhm_hz - lifetime_width_hz);
}

double lifetime_ratio(double t1_long_s, double t1_short_s) {
    if (!(t1_long_s > 0.0) || !(t1_short_s > 0.0)) throw DomainError("lifetimes must be positive");
    return t1_long_s / t1_short_s;
}

double saturation_parameter(double rabi, const EmitterParams& emitter) {
    return rabi * rabi / (emitter.gamma1() * emitter.gamma2());
}

double steady_state_population(const DriveParams& drive, const EmitterParams& emitter) {
    emitter.validate();
    const double g1 = emitter.gamma1();
    const double g2 = emitter.gamma2();
    const double o2 = drive.rabi * drive.rabi;
    return (o2 * g2 / (2.0 * g1)) / (drive.detuning * drive.detuning + g2 * g2 + o2 * g2 / g1);
}

double power_broadened_fwhm(double rabi, const EmitterParams& emitter) {
    return emitter.gamma2() / pi * std::sqrt(1.0 + saturation_parameter(rabi, emitter));
}

double PowerCalibration::rabi(double power) const {
    if (!(power >= 0.0)) throw DomainError("power must be non-negative");
    return rabi_per_sqrt_power * std::sqrt(power);
}

namespace {

double detected_share(const EmitterParams& emitter, const DetectionParams& detection) {
    return detection.scale * emitter.radiative_rate *
           (1.0 - (detection.zpl_blocked ? emitter.branching_ratio : 0.0));
}

}  // namespace

double detected_rate(const DriveParams& drive, const EmitterParams& emitter,
                     const DetectionParams& detection) {
    return detected_share(emitter, detection) * steady_state_population(drive, emitter);
}

double saturated_rate(const EmitterParams& emitter, const DetectionParams& detection) {
    return 0.5 * detected_share(emitter, detection);
}

Spectrum excitation_spectrum(std::span<const double> grid_hz, double power,
                             const PowerCalibration& calibration, const EmitterParams& emitter,
                             const DetectionParams& detection) {
    emitter.validate();
    if (grid_hz.size() < 2 || !strictly_increasing(grid_hz)) {
        throw DomainError("frequency grid must be strictly increasing");
    }
    const double rabi = calibration.rabi(power);
    const double width = power_broadened_fwhm(rabi, emitter);
    if (grid_hz.back() - grid_hz.front() < 5.0 * width) {
        throw CoverageError("grid spans fewer than five power-broadened linewidths");
    }
    Spectrum out;
    out.kind = SpectrumKind::fluorescence;
    out.frequency_hz.assign(grid_hz.begin(), grid_hz.end());
    out.values.reserve(grid_hz.size());
    for (double nu : grid_hz) {
        const DriveParams drive{rabi, to_angular(nu - emitter.resonance_hz)};
        out.values.push_back(detected_rate(drive, emitter, detection));
    }
    return out;
}

std::vector<double> saturation_curve(std::span<const double> powers, const EmitterParams& emitter,
                                     const PowerCalibration& calibration,
                                     const DetectionParams& detection) {
    std::vector<double> rates;
    rates.reserve(powers.size());
    for (double p : powers) {
        rates.push_back(detected_rate({calibration.rabi(p), 0.0}, emitter, detection));
    }
    return rates;
}

BlochState bloch_derivative(const BlochState& s, const DriveParams& drive,
                            const EmitterParams& emitter) {
    const double g1 = emitter.gamma1();
    const double g2 = emitter.gamma2();
    return {-g2 * s.u + drive.detuning * s.v,
            -drive.detuning * s.u - g2 * s.v - drive.rabi * s.w,
            drive.rabi * s.v - g1 * (s.w + 1.0)};
}

BlochState bloch_steady_state(const DriveParams& drive, const EmitterParams& emitter) {
    const double g1 = emitter.gamma1();
    const double g2 = emitter.gamma2();
    const double lorentz = drive.detuning * drive.detuning + g2 * g2;
    const double w = -g1 * lorentz / (g1 * lorentz + drive.rabi * drive.rabi * g2);
    const double v = -drive.rabi * w * g2 / lorentz;
    return {drive.detuning * v / g2, v, w};
}

double max_bloch_step(const DriveParams& drive, const EmitterParams& emitter) {
    double fastest = std::max(emitter.gamma1(), emitter.gamma2());
    fastest = std::max({fastest, std::abs(drive.rabi), std::abs(drive.detuning)});
    return 1.0 / fastest / 20.0;
}

namespace {

BlochState axpy(const BlochState& x, double a, const BlochState& k) {
    return {x.u + a * k.u, x.v + a * k.v, x.w + a * k.w};
}

BlochState rk4_step(const BlochState& s, double h, const DriveParams& drive,
                    const EmitterParams& emitter) {
    const BlochState k1 = bloch_derivative(s, drive, emitter);
    const BlochState k2 = bloch_derivative(axpy(s, 0.5 * h, k1), drive, emitter);
    const BlochState k3 = bloch_derivative(axpy(s, 0.5 * h, k2), drive, emitter);
    const BlochState k4 = bloch_derivative(axpy(s, h, k3), drive, emitter);
    return {s.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
            s.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
            s.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

}  // namespace

std::vector<BlochState> integrate_bloch(std::span<const double> times, const BlochState& initial,
                                        const DriveParams& drive, const EmitterParams& emitter,
                                        std::optional<double> max_step) {
    emitter.validate();
    const double bound = max_bloch_step(drive, emitter);
    if (max_step && !(*max_step > 0.0)) throw AccuracyError("integrator step must be positive");
    if (max_step && *max_step > bound * (1.0 + 1e-12)) {
        throw AccuracyError("integrator step exceeds min(1/Gamma1, 1/Gamma2, 1/Omega)/20");
    }
    const double h_max = max_step.value_or(bound);

    std::vector<BlochState> out;
    out.reserve(times.size());
    BlochState state = initial;
    double t = 0.0;
    for (double target : times) {
        if (!(target >= t)) throw DomainError("times must be non-negative and non-decreasing");
        const double span = target - t;
        const auto steps = static_cast<long long>(std::ceil(span / h_max - 1e-12));
        if (steps > 0) {
            const double h = span / static_cast<double>(steps);
            for (long long k = 0; k < steps; ++k) state = rk4_step(state, h, drive, emitter);
        }
        t = target;
        out.push_back(state);
    }
    return out;
}

std::vector<double> g2(std::span<const double> tau_s, const DriveParams& drive,
                       const EmitterParams& emitter, std::optional<double> max_step) {
    const double steady = bloch_steady_state(drive, emitter).excited_population();
    if (!(steady > 0.0)) throw DomainError("g2 needs a driven emitter (Omega > 0)");
    const std::vector<BlochState> states = integrate_bloch(tau_s, BlochState{}, drive, emitter, max_step);
    std::vector<double> out;
    out.reserve(states.size());
    for (const BlochState& s : states) out.push_back(s.excited_population() / steady);
    return out;
}

std::vector<double> g2_with_background(std::span<const double> g2_values, double signal_fraction) {
    if (!(signal_fraction > 0.0 && signal_fraction <= 1.0)) {
        throw DomainError("signal fraction must lie in (0, 1]");
    }
    const double r2 = signal_fraction * signal_fraction;
    std::vector<double> out;
    out.reserve(g2_values.size());
    for (double g : g2_values) out.push_back(1.0 - r2 * (1.0 - g));
    return out;
}

}  // namespace cloaksim
