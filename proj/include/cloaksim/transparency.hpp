#pragma once

#include <cstddef>
#include <vector>

#include "cloaksim/lineshape_model.hpp"

namespace cloaksim {

// Evenly spaced axial positions: n points spanning total_distance_nm,
// centered on center_nm.
std::vector<double> axial_positions(std::size_t n, double total_distance_nm,
                                    double center_nm = 0.0);

struct ZStack {
    std::vector<double> z_nm;
    std::vector<Spectrum> spectra;
};

ZStack generate_zstack(std::span<const double> grid_hz, const HybridModel& model,
                       std::span<const double> z_nm, unsigned threads = 1);

// Same model with the molecule removed from the optical response (g = 0,
// kappa_m = 0, F_m = 0): the antenna-only baseline.
HybridModel antenna_only(const HybridModel& model);

struct TransmissionChange {
    double relative_change = 0.0;  // max_nu T/T_antenna - 1 (or min if negative)
    double frequency_hz = 0.0;
    double antenna_transmission = 0.0;
};

// Largest relative excursion of T(nu)/T_antenna(nu) - 1 over the grid.
TransmissionChange transmission_change(std::span<const double> grid_hz, const HybridModel& model,
                                       double z_nm);

// Observed signatures of the cloaking experiment used to build a hybrid model.
struct TransparencyObservables {
    double feature_center_hz = 404.96e12;  // hybridized molecular line
    double transmission_increase = 0.10;   // on focus, relative to antenna-only level
    double feature_fwhm_hz = 290e6;
    double lamb_shift_hz = 12e6;
    double induced_width_hz = 94.4e6;      // width added by the antenna
    bool symmetric_on_focus = true;        // no dispersive component in the focal spectrum
};

// Builds a HybridModel with the given plasmon linewidth that reproduces the
// observables under the adiabatic formulas. The molecule is driven and detected
// only through the antenna (F_m = 0, kappa_m = 0); the plasmon resonance is
// placed so that Lamb shift / induced width matches, and zeta_p is solved for
// the on-focus transmission increase. With symmetric_on_focus the phase offset is
// chosen so the narrow feature at focus carries no dispersive part, and the
// `phase_offset` argument is ignored. Throws DomainError if no zeta_p in (0, 1)
// produces the requested increase.
// Phase offset that makes the narrow feature at focus a pure peak or dip:
// the coefficient of the hybridized Lorentzian in T is real.
double symmetric_phase_offset(const HybridModel& model, bool peak = true);

HybridModel design_transparency_model(const TransparencyObservables& observables,
                                      double plasmon_fwhm_hz, const FocusParams& focus,
                                      double phase_offset = 0.0);

}  // namespace cloaksim
