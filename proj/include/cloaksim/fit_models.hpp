#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cloaksim/lm.hpp"
#include "cloaksim/spectrum.hpp"

namespace cloaksim {

enum class Weighting { uniform, counts };

// baseline + amplitude / (1 + (2 (nu - center) / fwhm)^2). Negative amplitude is a dip.
double lorentzian(double nu_hz, double center_hz, double fwhm_hz, double amplitude,
                  double baseline);

struct LorentzianGuess {
    double center_hz = 0.0;
    double fwhm_hz = 0.0;
    double amplitude = 0.0;
    double baseline = 0.0;
};

// Peak/dip pick and half-height width from the data.
LorentzianGuess guess_lorentzian(const Spectrum& spectrum);

// Parameters: center_hz, fwhm_hz (log), amplitude, baseline.
FitProblem make_lorentzian_problem(const Spectrum& spectrum, const LorentzianGuess& guess,
                                   Weighting weighting);

// Non-convergence and a vanishing amplitude are reported in the result, never thrown.
FitResult fit_lorentzian(const Spectrum& spectrum, std::optional<LorentzianGuess> guess = {},
                         Weighting weighting = Weighting::uniform, const LmOptions& options = {});

// Point scatterer seen through a phase-shifted reference field:
// baseline * |1 - zeta e^{-i phase} L(nu)|^2 with L = (g/2) / (i (c - nu) + g/2).
double dispersive_profile(double nu_hz, double center_hz, double fwhm_hz, double zeta,
                          double phase, double baseline);

// Parameters: center_hz, fwhm_hz (log), zeta, phase, baseline.
FitProblem make_dispersive_problem(const Spectrum& spectrum, std::span<const double> initial);

FitResult fit_dispersive(const Spectrum& spectrum, std::optional<std::vector<double>> initial = {},
                         const LmOptions& options = {});

// R(P) = R_inf * (P / P_sat) / (1 + P / P_sat).
double saturation_model(double power, double saturated_rate, double saturation_power);

// Parameters: saturated_rate (log), saturation_power (log).
FitProblem make_saturation_problem(std::span<const double> powers, std::span<const double> rates,
                                   std::span<const double> initial, Weighting weighting);

FitResult fit_saturation(std::span<const double> powers, std::span<const double> rates,
                         Weighting weighting = Weighting::counts, const LmOptions& options = {});

std::vector<double> make_weights(std::span<const double> data, Weighting weighting);

}  // namespace cloaksim
