#include "cloaksim/fit_models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "cloaksim/errors.hpp"

namespace cloaksim {

std::vector<double> make_weights(std::span<const double> data, Weighting weighting) {
    if (weighting == Weighting::uniform) return {};
    std::vector<double> w;
    w.reserve(data.size());
    for (double v : data) w.push_back(1.0 / std::max(v, 1.0));
    return w;
}

double lorentzian(double nu_hz, double center_hz, double fwhm_hz, double amplitude,
                  double baseline) {
    const double u = 2.0 * (nu_hz - center_hz) / fwhm_hz;
    return baseline + amplitude / (1.0 + u * u);
}

LorentzianGuess guess_lorentzian(const Spectrum& spectrum) {
    const auto& x = spectrum.frequency_hz;
    const auto& y = spectrum.values;
    const std::size_t n = y.size();
    if (n < 8) throw DomainError("Lorentzian fit needs at least 8 points");
    const std::size_t edge = std::max<std::size_t>(2, n / 10);
    double base = 0.0;
    for (std::size_t i = 0; i < edge; ++i) base += y[i] + y[n - 1 - i];
    base /= static_cast<double>(2 * edge);

    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const bool peak = (*hi - base) >= (base - *lo);
    const auto extreme = peak ? hi : lo;
    const std::size_t k = static_cast<std::size_t>(extreme - y.begin());

    LorentzianGuess g;
    g.baseline = base;
    g.amplitude = *extreme - base;
    g.center_hz = x[k];
    const double half = 0.5 * std::abs(g.amplitude);
    std::size_t a = k, b = k;
    while (a > 0 && std::abs(y[a - 1] - base) > half) --a;
    while (b + 1 < n && std::abs(y[b + 1] - base) > half) ++b;
    const double spacing = (x.back() - x.front()) / static_cast<double>(n - 1);
    const std::size_t ia = a > 0 ? a - 1 : a;
    const std::size_t ib = b + 1 < n ? b + 1 : b;
    g.fwhm_hz = std::max(x[ib] - x[ia] - spacing, 2.0 * spacing);
    return g;
}

FitProblem make_lorentzian_problem(const Spectrum& spectrum, const LorentzianGuess& guess,
                                   Weighting weighting) {
    FitProblem p;
    const std::vector<double> x = spectrum.frequency_hz;
    const std::vector<double> y = spectrum.values;
    p.residuals = [x, y](std::span<const double> q) {
        std::vector<double> r(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) r[i] = lorentzian(x[i], q[0], q[1], q[2], q[3]) - y[i];
        return r;
    };
    p.initial = {guess.center_hz, guess.fwhm_hz, guess.amplitude, guess.baseline};
    p.names = {"center_hz", "fwhm_hz", "amplitude", "baseline"};
    p.transforms = {ParamTransform::identity, ParamTransform::log, ParamTransform::identity,
                    ParamTransform::identity};
    const double level = std::max({std::abs(guess.amplitude), std::abs(guess.baseline), 1e-12});
    p.scales = {guess.fwhm_hz, guess.fwhm_hz, level, level};
    p.weights = make_weights(y, weighting);
    return p;
}

FitResult fit_lorentzian(const Spectrum& spectrum, std::optional<LorentzianGuess> guess,
                         Weighting weighting, const LmOptions& options) {
    if (spectrum.size() < 8) throw DomainError("Lorentzian fit needs at least 8 points");
    const LorentzianGuess start = guess.value_or(guess_lorentzian(spectrum));
    FitResult fit = lm_minimize(make_lorentzian_problem(spectrum, start, weighting), options);
    const double amp = fit.parameter("amplitude");
    if (!(std::abs(amp) > 0.0) || !(std::abs(amp) > 3.0 * fit.error("amplitude"))) {
        fit.converged = false;
        fit.termination = "degenerate: amplitude consistent with zero";
        fit.warnings.push_back("zero-amplitude fit, no line detected");
    }
    return fit;
}

double dispersive_profile(double nu_hz, double center_hz, double fwhm_hz, double zeta,
                          double phase, double baseline) {
    const std::complex<double> l = 0.5 * fwhm_hz / std::complex<double>(0.5 * fwhm_hz, center_hz - nu_hz);
    return baseline * std::norm(1.0 - zeta * std::polar(1.0, -phase) * l);
}

FitProblem make_dispersive_problem(const Spectrum& spectrum, std::span<const double> initial) {
    if (initial.size() != 5) throw DomainError("dispersive profile has five parameters");
    FitProblem p;
    const std::vector<double> x = spectrum.frequency_hz;
    const std::vector<double> y = spectrum.values;
    p.residuals = [x, y](std::span<const double> q) {
        std::vector<double> r(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            r[i] = dispersive_profile(x[i], q[0], q[1], q[2], q[3], q[4]) - y[i];
        }
        return r;
    };
    p.initial.assign(initial.begin(), initial.end());
    p.names = {"center_hz", "fwhm_hz", "zeta", "phase_rad", "baseline"};
    p.transforms = {ParamTransform::identity, ParamTransform::log, ParamTransform::identity,
                    ParamTransform::identity, ParamTransform::identity};
    p.lower = {-INFINITY, 0.0, 0.0, -INFINITY, 0.0};
    p.upper = {INFINITY, INFINITY, 0.999, INFINITY, INFINITY};
    p.scales = {initial[1], initial[1], 0.1, 1.0, std::max(initial[4], 1e-12)};
    return p;
}

FitResult fit_dispersive(const Spectrum& spectrum, std::optional<std::vector<double>> initial,
                         const LmOptions& options) {
    if (initial) return lm_minimize(make_dispersive_problem(spectrum, *initial), options);
    const LorentzianGuess g = guess_lorentzian(spectrum);
    const double base = std::max(g.baseline, 1e-12);
    const double depth = std::clamp(std::abs(g.amplitude) / base, 1e-4, 0.9);
    const double zeta = std::min(depth / (1.0 + std::sqrt(1.0 - depth)), 0.99);
    FitResult best;
    bool have = false;
    for (double phase : {0.0, 0.5 * std::numbers::pi, -0.5 * std::numbers::pi, std::numbers::pi}) {
        const std::vector<double> start = {g.center_hz, g.fwhm_hz, zeta, phase, base};
        FitResult fit = lm_minimize(make_dispersive_problem(spectrum, start), options);
        if (!have || fit.rss < best.rss) {
            best = std::move(fit);
            have = true;
        }
    }
    return best;
}

double saturation_model(double power, double saturated_rate, double saturation_power) {
    const double s = power / saturation_power;
    return saturated_rate * s / (1.0 + s);
}

FitProblem make_saturation_problem(std::span<const double> powers, std::span<const double> rates,
                                   std::span<const double> initial, Weighting weighting) {
    if (powers.size() != rates.size() || powers.size() < 3) {
        throw DomainError("saturation fit needs at least three (power, rate) pairs");
    }
    FitProblem p;
    const std::vector<double> x(powers.begin(), powers.end());
    const std::vector<double> y(rates.begin(), rates.end());
    p.residuals = [x, y](std::span<const double> q) {
        std::vector<double> r(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) r[i] = saturation_model(x[i], q[0], q[1]) - y[i];
        return r;
    };
    p.initial.assign(initial.begin(), initial.end());
    p.names = {"saturated_rate", "saturation_power"};
    p.transforms = {ParamTransform::log, ParamTransform::log};
    p.weights = make_weights(y, weighting);
    return p;
}

FitResult fit_saturation(std::span<const double> powers, std::span<const double> rates,
                         Weighting weighting, const LmOptions& options) {
    if (powers.size() != rates.size() || powers.size() < 3) {
        throw DomainError("saturation fit needs at least three (power, rate) pairs");
    }
    const double top = *std::max_element(rates.begin(), rates.end());
    if (!(top > 0.0)) throw DomainError("saturation data has no signal");
    const double r_inf = 1.5 * top;
    double p_sat = 0.0;
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (rates[i] >= 0.5 * r_inf && powers[i] > 0.0) {
            p_sat = powers[i];
            break;
        }
    }
    if (!(p_sat > 0.0)) p_sat = *std::max_element(powers.begin(), powers.end());
    const std::vector<double> start = {r_inf, p_sat};
    return lm_minimize(make_saturation_problem(powers, rates, start, weighting), options);
}

}  // namespace cloaksim
