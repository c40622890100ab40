#include "cloaksim/fit_g2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cloaksim/errors.hpp"

namespace cloaksim {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct G2Layout {
    bool dephasing = false;
    bool fraction = false;
    bool rabi_scale = false;
};

struct G2Unpacked {
    EmitterParams emitter;
    double signal_fraction = 1.0;
    double rabi_scale = 1.0;
    std::vector<double> rabi;
};

G2Unpacked unpack_g2(std::span<const double> q, const G2Layout& layout, const G2FitSettings& s,
                     std::span<const G2Dataset> data) {
    G2Unpacked u;
    const double nr_share = s.initial.nonradiative_rate / s.initial.gamma1();
    std::size_t j = 0;
    const double gamma1 = q[j++];
    u.emitter = s.initial;
    u.emitter.radiative_rate = gamma1 * (1.0 - nr_share);
    u.emitter.nonradiative_rate = gamma1 * nr_share;
    if (layout.dephasing) u.emitter.pure_dephasing = q[j++];
    u.signal_fraction = layout.fraction ? q[j++] : s.signal_fraction;
    u.rabi_scale = layout.rabi_scale ? q[j++] : s.rabi_scale;
    for (const G2Dataset& d : data) u.rabi.push_back(u.rabi_scale * d.rabi);
    return u;
}

}  // namespace

FitProblem make_g2_problem(std::span<const G2Dataset> data, const G2FitSettings& s) {
    if (data.empty()) throw DomainError("g2 fit needs at least one trace");
    s.initial.validate();
    if (!(s.signal_fraction > 0.0 && s.signal_fraction <= 1.0)) {
        throw DomainError("signal fraction must lie in (0, 1]");
    }
    const double g1 = s.initial.gamma1();
    for (const G2Dataset& d : data) {
        if (d.tau_s.size() != d.g2.size() || d.tau_s.empty()) {
            throw DomainError("g2 trace needs matching, non-empty tau and g2 columns");
        }
        const auto [lo, hi] = std::minmax_element(d.tau_s.begin(), d.tau_s.end());
        if ((*hi - *lo) * g1 < 5.0) throw DomainError("g2 trace covers less than 5 / Gamma_1 of delay");
        if (!(d.rabi > 0.0)) throw DomainError("Rabi frequency must be positive");
    }

    if (!(s.rabi_scale > 0.0)) throw DomainError("Rabi scale must be positive");
    const G2Layout layout{s.fit_dephasing, s.fit_signal_fraction, s.fit_rabi_scale};
    FitProblem p;
    const auto add = [&](const std::string& name, double v, ParamTransform t, double scale, double lo,
                         double hi) {
        p.names.push_back(name);
        p.initial.push_back(v);
        p.transforms.push_back(t);
        p.scales.push_back(scale);
        p.lower.push_back(lo);
        p.upper.push_back(hi);
    };
    add("gamma1", g1, ParamTransform::log, 1.0, -inf, inf);
    if (layout.dephasing) add("pure_dephasing", s.initial.pure_dephasing, ParamTransform::identity, g1, 0.0, inf);
    if (layout.fraction) add("signal_fraction", s.signal_fraction, ParamTransform::identity, 0.1, 1e-6, 1.0);
    if (layout.rabi_scale) add("rabi_scale", s.rabi_scale, ParamTransform::log, 1.0, -inf, inf);

    double step = std::numeric_limits<double>::infinity();
    for (const G2Dataset& d : data) {
        step = std::min(step, 0.25 * max_bloch_step({s.rabi_scale * d.rabi, d.detuning}, s.initial));
    }

    std::vector<G2Dataset> traces(data.begin(), data.end());
    const G2FitSettings settings = s;
    p.residuals = [=](std::span<const double> q) {
        const G2Unpacked u = unpack_g2(q, layout, settings, traces);
        std::vector<double> r;
        for (std::size_t k = 0; k < traces.size(); ++k) {
            const G2Dataset& d = traces[k];
            try {
                const DriveParams drive{u.rabi[k], d.detuning};
                const double h = std::min(step, max_bloch_step(drive, u.emitter));
                const std::vector<double> ideal = g2(d.tau_s, drive, u.emitter, h);
                const std::vector<double> model = g2_with_background(ideal, u.signal_fraction);
                for (std::size_t i = 0; i < model.size(); ++i) r.push_back(model[i] - d.g2[i]);
            } catch (const Error&) {
                r.assign(r.size() + d.g2.size(), std::numeric_limits<double>::quiet_NaN());
            }
        }
        return r;
    };
    return p;
}

G2Fit fit_g2(std::span<const G2Dataset> data, const G2FitSettings& settings, const LmOptions& options) {
    const FitProblem p = make_g2_problem(data, settings);
    G2Fit out;
    out.fit = lm_minimize(p, options);
    const G2Unpacked u = unpack_g2(out.fit.parameters,
                                   {settings.fit_dephasing, settings.fit_signal_fraction, settings.fit_rabi_scale},
                                   settings, data);
    out.emitter = u.emitter;
    out.signal_fraction = u.signal_fraction;
    out.rabi_scale = u.rabi_scale;
    out.rabi = u.rabi;
    const double g1 = u.emitter.gamma1();
    const double g2r = u.emitter.gamma2();
    bool resonant = true;
    for (const G2Dataset& d : data) resonant = resonant && d.detuning == 0.0;
    if (resonant && settings.fit_dephasing && g1 - 0.5 * g2r >= 0.0 && std::abs(g2r - g1) > 1e-3 * g1) {
        std::ostringstream msg;
        msg << "mirror solution with Gamma_1 and Gamma_2 exchanged fits equally well: lifetime "
            << 1e9 / g2r << " ns, pure dephasing " << (g1 - 0.5 * g2r) / (2.0 * std::numbers::pi) / 1e6
            << " MHz";
        out.fit.warnings.push_back(msg.str());
    }
    return out;
}

}  // namespace cloaksim
