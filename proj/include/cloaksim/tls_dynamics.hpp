#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cloaksim/spectrum.hpp"

namespace cloaksim {

// Two-level emitter. Rates are angular (rad/s); resonance in Hz.
struct EmitterParams {
    double resonance_hz = 404.96e12;
    double radiative_rate = 0.0;
    double nonradiative_rate = 0.0;
    double pure_dephasing = 0.0;
    double branching_ratio = 0.44;  // share of decay through the zero-phonon line

    double gamma1() const { return radiative_rate + nonradiative_rate; }
    double gamma2() const { return 0.5 * gamma1() + pure_dephasing; }
    double lifetime_s() const { return 1.0 / gamma1(); }

    // Purely radiative emitter with lifetime t1 and pure dephasing Gamma*/2pi (Hz).
    static EmitterParams from_lifetime(double t1_s, double pure_dephasing_hz = 0.0,
                                       double resonance_hz = 404.96e12,
                                       double branching_ratio = 0.44);

    void validate() const;
};

struct DriveParams {
    double rabi = 0.0;      // Omega, rad/s
    double detuning = 0.0;  // delta = w_laser - w_emitter, rad/s
};

// Gamma_1 / 2pi = 1 / (2 pi T1), in Hz.
double linewidth_from_lifetime(double t1_s);

// (Gamma_1 + 2 Gamma*) / 2pi, in Hz, from angular rates.
double total_fwhm(double gamma1, double pure_dephasing);

// Gamma*/2pi (Hz) that explains a measured FWHM given the lifetime-limited width.
double pure_dephasing_from_widths(double fwhm_hz, double lifetime_width_hz);

double lifetime_ratio(double t1_long_s, double t1_short_s);

// s = Omega^2 / (Gamma_1 Gamma_2).
double saturation_parameter(double rabi, const EmitterParams& emitter);

double steady_state_population(const DriveParams& drive, const EmitterParams& emitter);

// (Gamma_2 / pi) sqrt(1 + s), in Hz.
double power_broadened_fwhm(double rabi, const EmitterParams& emitter);

// Omega = c sqrt(P); the power unit (e.g. nW) is the caller's choice.
struct PowerCalibration {
    double rabi_per_sqrt_power = 0.0;

    double rabi(double power) const;
};

// Folds collection efficiency, filters and detector response into one scale.
// With zpl_blocked the zero-phonon share of the emission is filtered out.
struct DetectionParams {
    double scale = 1.0;
    bool zpl_blocked = true;
};

double detected_rate(const DriveParams& drive, const EmitterParams& emitter,
                     const DetectionParams& detection);

// Asymptotic detected rate for s -> infinity.
double saturated_rate(const EmitterParams& emitter, const DetectionParams& detection);

// Throws CoverageError when the grid spans fewer than five power-broadened widths.
Spectrum excitation_spectrum(std::span<const double> grid_hz, double power,
                             const PowerCalibration& calibration, const EmitterParams& emitter,
                             const DetectionParams& detection = {});

std::vector<double> saturation_curve(std::span<const double> powers, const EmitterParams& emitter,
                                     const PowerCalibration& calibration,
                                     const DetectionParams& detection = {});

// Bloch vector: u, v coherences, w population inversion; rho_ee = (1 + w) / 2.
struct BlochState {
    double u = 0.0;
    double v = 0.0;
    double w = -1.0;

    double excited_population() const { return 0.5 * (1.0 + w); }
};

BlochState bloch_derivative(const BlochState& s, const DriveParams& drive,
                            const EmitterParams& emitter);

BlochState bloch_steady_state(const DriveParams& drive, const EmitterParams& emitter);

// Largest accepted RK4 step: min(1/Gamma_1, 1/Gamma_2, 1/Omega, 1/|delta|) / 20.
double max_bloch_step(const DriveParams& drive, const EmitterParams& emitter);

// Fixed-step RK4 from `initial` at t = 0, sampled at `times` (non-negative,
// non-decreasing). Each interval is split evenly into steps no longer than
// `max_step` (default max_bloch_step). Throws AccuracyError if max_step exceeds
// the bound.
std::vector<BlochState> integrate_bloch(std::span<const double> times, const BlochState& initial,
                                        const DriveParams& drive, const EmitterParams& emitter,
                                        std::optional<double> max_step = std::nullopt);

// Intensity autocorrelation via the quantum regression property:
// g2(tau) = rho_ee(tau | ground at 0) / rho_ee(steady state).
std::vector<double> g2(std::span<const double> tau_s, const DriveParams& drive,
                       const EmitterParams& emitter, std::optional<double> max_step = std::nullopt);

// Uncorrelated background: g2_meas = 1 - rho_s^2 (1 - g2).
std::vector<double> g2_with_background(std::span<const double> g2_values, double signal_fraction);

}  // namespace cloaksim
