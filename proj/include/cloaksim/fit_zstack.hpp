#pragma once

#include <span>
#include <vector>

#include "cloaksim/fit_models.hpp"
#include "cloaksim/lineshape_model.hpp"
#include "cloaksim/lm.hpp"

namespace cloaksim {

// Global fit of transmission spectra taken at axial positions
// z_k = z_offset + k * z_step. All physical parameters are shared.
// z_step is fixed by default; it is degenerate with the Rayleigh range.
struct ZStackFitSettings {
    HybridModel initial;
    double z_offset_nm = 0.0;
    double z_step_nm = 250.0;

    bool fit_molecule_resonance = true;
    bool fit_molecule_width = true;
    bool fit_coupling = true;
    bool fit_zeta_p = true;
    bool fit_phase_offset = true;
    bool fit_rayleigh_range = true;
    bool fit_z_offset = true;
    bool fit_z_step = false;
    bool fit_plasmon_resonance = false;
    bool fit_plasmon_width = false;
    bool fit_molecule_scatter = false;  // kappa_m / kappa_p
    bool fit_molecule_drive = false;    // f_m / f_p
    bool per_spectrum_baseline = false; // T -> T (b0_k + b1_k (nu - nu_ref)), off by default

    Weighting weighting = Weighting::uniform;
};

struct ZStackFit {
    FitResult fit;
    HybridModel model;
    double z_offset_nm = 0.0;
    double z_step_nm = 0.0;
    std::vector<double> spectrum_rss;  // weighted RSS per spectrum
};

// Residual builder shared by fit_zstack and the Jacobian checks.
struct ZStackProblem {
    FitProblem problem;
    // Maps a parameter vector back onto (model, z_offset, z_step, baselines).
    std::function<ZStackFit(std::span<const double>)> unpack;
};

ZStackProblem make_zstack_problem(std::span<const Spectrum> stack, const ZStackFitSettings& settings);

// Throws DomainError with fewer than three spectra. A singular covariance at
// the solution is reported as a rank-deficiency warning.
ZStackFit fit_zstack(std::span<const Spectrum> stack, const ZStackFitSettings& settings,
                     const LmOptions& options = {});

// Starting point for an unattended fit: feature center and width from the
// strongest spectrum, zeta_p from the deepest antenna baseline, several
// detection phases tried and the lowest-cost start kept.
ZStackFitSettings guess_zstack(std::span<const Spectrum> stack, const ZStackFitSettings& base);

}  // namespace cloaksim
