#pragma once

#include <complex>
#include <span>

#include "cloaksim/beam_optics.hpp"
#include "cloaksim/spectrum.hpp"

namespace cloaksim {

using complex = std::complex<double>;

// One driven, damped oscillator. Frequencies and damping are angular (rad/s);
// damping is the FWHM of the resonance in angular units.
struct OscillatorParams {
    double resonance = 0.0;
    double damping = 0.0;
    double drive_amplitude = 1.0;
    double drive_phase = 0.0;
    double scatter_coupling = 1.0;

    static OscillatorParams from_hz(double resonance_hz, double fwhm_hz,
                                    double drive_amplitude = 1.0, double scatter_coupling = 1.0,
                                    double drive_phase = 0.0);

    complex drive() const { return std::polar(drive_amplitude, drive_phase); }
    // Zero damping is accepted for forward evaluation.
    void validate() const;
};

// Molecule coupled to a plasmonic antenna, both driven by the focused beam.
//
// Equations of motion in steady state:
//   D_p x_p + g x_m = F_p,   D_m x_m + g x_p = F_m,
// with D_j(w) = w_j^2 - w^2 - i gamma_j w. The detected transmission is
//   T = |1 + i a(z) e^{-i phi(z)} N (kappa_p x_p + kappa_m x_m)|^2,
// where N is fixed so that the bare plasmon alone gives an on-focus resonant
// extinction amplitude zeta_p (the molecule takes this role when the plasmon
// neither scatters nor is driven).
struct HybridModel {
    OscillatorParams plasmon;
    OscillatorParams molecule;
    double coupling = 0.0;  // g, (rad/s)^2
    double zeta_p = 0.0;
    double phase_offset = 0.0;  // phi_0, rad
    FocusParams focus;

    void validate() const;
};

struct OscillatorAmplitudes {
    complex plasmon;
    complex molecule;
};

// D(w) = (w0 - w)(w0 + w) - i gamma w, factored to avoid cancellation near resonance.
complex oscillator_denominator(double omega, const OscillatorParams& osc);

// Normalized single-oscillator response -i gamma w0 / D(w); equals 1 on resonance
// and reduces to (gamma/2)/(i(w0-w)+gamma/2) close to it.
complex normalized_response(double omega, const OscillatorParams& osc);

// Steady-state amplitudes. Throws SingularityError when |D_p D_m - g^2| vanishes.
OscillatorAmplitudes coupled_response(double omega, const HybridModel& model);

// Complex factor N multiplying the scattered amplitude (see HybridModel).
complex detection_scale(const HybridModel& model);

// Transmission at one ordinary frequency (Hz) and axial position (nm).
double composite_transmission_at(double frequency_hz, const HybridModel& model, double z_nm);

Spectrum composite_transmission(std::span<const double> grid_hz, const HybridModel& model,
                                double z_nm, unsigned threads = 1);

// T = |1 - zeta a(z) e^{-i phi(z)} L(w)|^2 for one point scatterer,
// phi(z) = phase_offset + gouy_phase(z).
Spectrum single_scatterer_transmission(std::span<const double> grid_hz,
                                       const OscillatorParams& params, double zeta, double z_nm,
                                       const FocusParams& focus, double phase_offset = 0.0);

struct Hybridization {
    double lamb_shift_hz = 0.0;
    double induced_width_hz = 0.0;  // FWHM added to the molecular line
    double total_width_hz = 0.0;    // molecule damping / 2pi + induced width
    bool adiabatic = true;          // plasmon at least 10x broader than the molecule
};

// Adiabatic elimination of the plasmon: Sigma = g^2 / D_p(w_m).
Hybridization hybridized_emitter(const HybridModel& model);

// Coupling g that produces the requested induced width (Hz) for this geometry.
double coupling_for_induced_width(const HybridModel& model, double induced_width_hz);

struct FeatureOptions {
    double window_lo_hz = 0.0;  // both zero: whole spectrum
    double window_hi_hz = 0.0;
    double edge_fraction = 0.1;  // outer share of points used for the baseline
    double threshold = 1e-6;     // minimum |excursion| counted as a feature
};

struct FeatureMetrics {
    double asymmetry = 0.0;     // in [-1, 1]
    double contrast = 0.0;      // max |T - baseline|
    double centroid_hz = 0.0;   // centroid of |T - baseline|
    double noise_rms = 0.0;     // residual scatter of the baseline region
};

// Narrow-feature analysis. A linear baseline is fitted to the window edges;
// with d = T - baseline and c the centroid of |d|, the asymmetry is
//   (int_{nu>c} d - int_{nu<c} d) / int |d|,
// zero for profiles symmetric about their center and sign-flipped by mirroring.
// Throws DetectionError when no excursion exceeds the threshold.
FeatureMetrics analyze_feature(const Spectrum& spectrum, const FeatureOptions& options = {});

double fano_asymmetry(const Spectrum& spectrum, const FeatureOptions& options = {});

}  // namespace cloaksim
