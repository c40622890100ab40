#pragma once

#include <span>
#include <vector>

#include "cloaksim/lm.hpp"
#include "cloaksim/tls_dynamics.hpp"

namespace cloaksim {

// One measured g2 trace at a fixed drive.
struct G2Dataset {
    std::vector<double> tau_s;
    std::vector<double> g2;
    double rabi = 0.0;      // calibrated drive for this trace, rad/s
    double detuning = 0.0;  // rad/s
};

// Joint fit over several drive strengths sharing Gamma_1, Gamma* and the
// signal fraction. The ratio Gamma_nr / Gamma_1 of `initial` is preserved.
//
// On resonance the normalized g2 depends on the rates only through
// Gamma_1 + Gamma_2 and Gamma_1 Gamma_2 + Omega^2. Independent Rabi frequencies
// per trace would leave a flat direction, so the drives enter as given values
// times one optional shared calibration factor, and exchanging Gamma_1 with
// Gamma_2 leaves the data unchanged: the branch nearest `initial` is returned
// and the mirror solution is reported as a warning.
struct G2FitSettings {
    EmitterParams initial;
    double signal_fraction = 1.0;
    double rabi_scale = 1.0;
    bool fit_rabi_scale = false;
    bool fit_dephasing = true;
    bool fit_signal_fraction = true;
};

struct G2Fit {
    FitResult fit;
    EmitterParams emitter;
    double signal_fraction = 1.0;
    double rabi_scale = 1.0;
    std::vector<double> rabi;  // scaled drive per trace
};

// Parameters: gamma1 (log), pure_dephasing, signal_fraction, rabi_scale (log).
FitProblem make_g2_problem(std::span<const G2Dataset> data, const G2FitSettings& settings);

// Throws DomainError if a trace covers less than 5 / Gamma_1 of delay.
G2Fit fit_g2(std::span<const G2Dataset> data, const G2FitSettings& settings,
             const LmOptions& options = {});

}  // namespace cloaksim
