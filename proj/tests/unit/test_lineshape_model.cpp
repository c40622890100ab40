#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"

#include "cloaksim/beam_optics.hpp"
#include "cloaksim/errors.hpp"
#include "cloaksim/lineshape_model.hpp"
#include "cloaksim/transparency.hpp"
#include "cloaksim/units.hpp"
#include "support.hpp"

using namespace cloaksim;

namespace {

HybridModel test_system() {
    HybridModel m;
    m.plasmon = OscillatorParams::from_hz(105e9, 10e9, 1.0, 1.0, 0.3);
    m.molecule = OscillatorParams::from_hz(100e9, 100e6, 0.2, 0.1, -0.7);
    m.coupling = 0.3 * to_angular(100e9) * to_angular(1e9);
    m.zeta_p = 0.2;
    m.focus = make_focus(740.0, 270.0);
    return m;
}

HybridModel optical_system(double induced_hz) {
    HybridModel m;
    m.plasmon = OscillatorParams::from_hz(405.5e12, 2e12, 1.0, 1.0);
    m.molecule = OscillatorParams::from_hz(404.96e12, 200e6, 0.0, 0.0);
    m.zeta_p = 0.25;
    m.focus = make_focus(740.0, 270.0);
    m.coupling = coupling_for_induced_width(m, induced_hz);
    return m;
}

}  // namespace

TEST_CASE("coupled response matches a direct 2x2 solve") {
    const HybridModel m = test_system();
    for (double nu : linspace(99e9, 101e9, 41)) {
        const double w = to_angular(nu);
        Eigen::Matrix2cd a;
        a << oscillator_denominator(w, m.plasmon), m.coupling, m.coupling, oscillator_denominator(w, m.molecule);
        const Eigen::Vector2cd x = a.fullPivLu().solve(Eigen::Vector2cd(m.plasmon.drive(), m.molecule.drive()));
        const OscillatorAmplitudes r = coupled_response(w, m);
        CHECK(std::abs(r.plasmon - x(0)) <= 1e-10 * std::abs(x(0)));
        CHECK(std::abs(r.molecule - x(1)) <= 1e-10 * std::abs(x(1)));
    }
}

TEST_CASE("decoupled limits") {
    HybridModel m = test_system();
    m.coupling = 0.0;
    const double w = to_angular(100.01e9);
    CHECK(coupled_response(w, m).molecule == m.molecule.drive() / oscillator_denominator(w, m.molecule));
    m.molecule.drive_amplitude = 0.0;
    CHECK(coupled_response(w, m).molecule == complex(0.0, 0.0));
}

TEST_CASE("vanishing determinant raises a singularity error") {
    HybridModel m = test_system();
    m.coupling = 0.0;
    m.molecule.damping = 0.0;
    CHECK_THROWS_AS(coupled_response(m.molecule.resonance, m), SingularityError);
}

TEST_CASE("composite model reduces to the single scatterer") {
    HybridModel m = optical_system(0.0);
    m.molecule.scatter_coupling = 0.0;
    m.phase_offset = 0.4;
    const auto grid = linspace(395e12, 415e12, 801);
    for (double z : {0.0, 200.0, -650.0}) {
        const Spectrum a = composite_transmission(grid, m, z);
        const Spectrum b = single_scatterer_transmission(grid, m.plasmon, m.zeta_p, z, m.focus, m.phase_offset);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-12);
    }
}

TEST_CASE("antenna alone on focus gives the configured dip") {
    HybridModel m = optical_system(0.0);
    m.zeta_p = zeta_from_dip(0.5);
    const double nu_p = to_hz(m.plasmon.resonance);
    const Spectrum s = composite_transmission(linspace(nu_p - 5e12, nu_p + 5e12, 2001), m, 0.0);
    CHECK(*std::min_element(s.values.begin(), s.values.end()) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(composite_transmission_at(nu_p, m, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("bare molecule gives a symmetric 4% dip") {
    HybridModel m = optical_system(0.0);
    m.plasmon.scatter_coupling = 0.0;
    m.plasmon.drive_amplitude = 0.0;
    m.molecule.drive_amplitude = 1.0;
    m.molecule.scatter_coupling = 1.0;
    m.zeta_p = zeta_from_dip(0.04);
    const double nu_m = to_hz(m.molecule.resonance);
    const Spectrum s = composite_transmission(linspace(nu_m - 2e9, nu_m + 2e9, 2001), m, 0.0);
    const auto it = std::min_element(s.values.begin(), s.values.end());
    CHECK(*it == doctest::Approx(0.96).epsilon(1e-9));
    CHECK(s.frequency_hz[static_cast<std::size_t>(it - s.values.begin())] == doctest::Approx(nu_m).epsilon(1e-15));
    CHECK(std::abs(fano_asymmetry(s)) < 1e-6);
}

TEST_CASE("far from the antenna resonance the transmission returns to one") {
    const OscillatorParams p = OscillatorParams::from_hz(405e12, 1e12);
    const FocusParams focus = make_focus(740.0, 270.0);
    for (double zeta : {0.05, 0.2, 0.3}) {
        for (double offset : {10e12, 12e12, 20e12}) {
            const std::vector<double> grid{405e12 - offset, 405e12 + offset};
            const Spectrum s = single_scatterer_transmission(grid, p, zeta, 0.0, focus);
            for (double v : s.values) CHECK(std::abs(v - 1.0) < 2e-3);
        }
    }
}

TEST_CASE("transmission stays non-negative") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        HybridModel m = optical_system(300e6 * u(rng));
        m.zeta_p = 0.95 * u(rng);
        m.phase_offset = 6.0 * u(rng) - 3.0;
        m.molecule.scatter_coupling = u(rng);
        m.molecule.drive_amplitude = u(rng);
        const double z = 3000.0 * u(rng) - 1500.0;
        const Spectrum s = composite_transmission(linspace(404.9e12, 405.02e12, 301), m, z);
        for (double v : s.values) CHECK(v >= 0.0);
    }
}

TEST_CASE("parallel evaluation is bit-identical") {
    const HybridModel m = optical_system(90e6);
    const auto grid = linspace(404.958e12, 404.962e12, 1001);
    const Spectrum a = composite_transmission(grid, m, 130.0, 1);
    const Spectrum b = composite_transmission(grid, m, 130.0, 4);
    CHECK(a.values == b.values);
}

TEST_CASE("hybridization limits and signs") {
    HybridModel m = optical_system(0.0);
    const Hybridization zero = hybridized_emitter(m);
    CHECK(zero.lamb_shift_hz == 0.0);
    CHECK(zero.induced_width_hz == 0.0);

    m.plasmon.resonance = m.molecule.resonance;
    m.coupling = coupling_for_induced_width(m, 50e6);
    CHECK(std::abs(hybridized_emitter(m).lamb_shift_hz) < 1e-9);
    CHECK(hybridized_emitter(m).induced_width_hz == doctest::Approx(50e6).epsilon(1e-12));

    for (double detuning : {-600e9, 600e9}) {
        HybridModel d = optical_system(0.0);
        d.plasmon.resonance = d.molecule.resonance + to_angular(detuning);
        d.coupling = coupling_for_induced_width(d, 20e6);
        const double shift = hybridized_emitter(d).lamb_shift_hz;
        CHECK(shift * (to_hz(d.molecule.resonance) - to_hz(d.plasmon.resonance)) > 0.0);
        CHECK(hybridized_emitter(d).induced_width_hz >= 0.0);
    }
}

TEST_CASE("induced width grows monotonically with coupling") {
    HybridModel m = optical_system(0.0);
    const double g_max = coupling_for_induced_width(m, to_hz(m.plasmon.damping) / 10.0);
    double previous = -1.0;
    for (int i = 1; i <= 40; ++i) {
        m.coupling = g_max * std::sqrt(i / 40.0);
        const double w = hybridized_emitter(m).induced_width_hz;
        CHECK(w > previous);
        previous = w;
    }
}

TEST_CASE("adiabatic formulas agree with a fine-grid extraction") {
    HybridModel m;
    m.plasmon = OscillatorParams::from_hz(110e9, 40e9, 0.0, 1.0);
    m.molecule = OscillatorParams::from_hz(100e9, 100e6, 1.0, 0.0);
    m.focus = make_focus(740.0, 270.0);
    m.coupling = coupling_for_induced_width(m, 50e6);
    const Hybridization h = hybridized_emitter(m);
    CHECK(h.adiabatic);

    const auto grid = linspace(99e9, 101e9, 200001);
    std::vector<double> power;
    for (double nu : grid) power.push_back(std::norm(coupled_response(to_angular(nu), m).molecule));
    const PeakWidth p = measure_peak_width(grid, power, 0.0);
    const std::size_t i = p.peak_index;
    const double curvature = power[i - 1] - 2.0 * power[i] + power[i + 1];
    const double peak_hz = grid[i] + 0.5 * (grid[i + 1] - grid[i]) * (power[i - 1] - power[i + 1]) / curvature;
    CHECK(testing::rel_diff(peak_hz - 100e9, h.lamb_shift_hz) < 0.01);
    CHECK(testing::rel_diff(p.fwhm_hz - 100e6, h.induced_width_hz) < 0.01);
    CHECK(testing::rel_diff(p.fwhm_hz, h.total_width_hz) < 0.01);
}

TEST_CASE("asymmetry metric on analytic profiles") {
    const auto grid = linspace(-1e9, 1e9, 2001);
    Spectrum dip{grid, {}}, peak{grid, {}}, flat{grid, std::vector<double>(grid.size(), 1.0)};
    for (double nu : grid) {
        const double l = 1.0 / (1.0 + std::pow(nu / 50e6, 2));
        dip.values.push_back(1.0 - 0.04 * l);
        peak.values.push_back(1.0 + 0.1 * l);
    }
    CHECK(std::abs(fano_asymmetry(dip)) < 1e-6);
    CHECK(std::abs(fano_asymmetry(peak)) < 1e-6);
    CHECK_THROWS_AS(fano_asymmetry(flat), DetectionError);

    Spectrum mirrored{grid, {}}, dispersive{grid, {}};
    for (double nu : grid) {
        const double x = nu / 50e6;
        dispersive.values.push_back(1.0 + 0.05 * x / (1.0 + x * x));
        mirrored.values.push_back(1.0 - 0.05 * x / (1.0 + x * x));
    }
    const double a = fano_asymmetry(dispersive);
    CHECK(std::abs(a) > 0.5);
    CHECK(std::abs(a + fano_asymmetry(mirrored)) < 1e-12);
}

TEST_CASE("single scatterer mirror images across the focus") {
    const OscillatorParams osc = OscillatorParams::from_hz(404.96e12, 50e6);
    const FocusParams focus = make_focus(740.0, 270.0);
    const auto grid = linspace(404.96e12 - 1e9, 404.96e12 + 1e9, 2001);
    const double zeta = zeta_from_dip(0.04);
    CHECK(std::abs(fano_asymmetry(single_scatterer_transmission(grid, osc, zeta, 0.0, focus))) < 1e-6);
    for (double z : {focus.rayleigh_range_nm, 3.0 * focus.rayleigh_range_nm}) {
        const double up = fano_asymmetry(single_scatterer_transmission(grid, osc, zeta, z, focus));
        const double dn = fano_asymmetry(single_scatterer_transmission(grid, osc, zeta, -z, focus));
        CHECK(std::abs(up) > 0.1);
        CHECK(std::abs(up + dn) < 1e-6);
    }
}

TEST_CASE("asymmetry changes sign once over a z-stack") {
    HybridModel m = optical_system(90e6);
    m.plasmon.resonance = m.molecule.resonance;
    m.coupling = coupling_for_induced_width(m, 90e6);
    const auto z = axial_positions(15, 3500.0, 0.0);
    const ZStack stack = generate_zstack(linspace(404.958e12, 404.962e12, 1601), m, z);
    int flips = 0;
    for (std::size_t k = 1; k < z.size(); ++k) {
        if (fano_asymmetry(stack.spectra[k - 1]) * fano_asymmetry(stack.spectra[k]) < 0.0) ++flips;
    }
    CHECK(flips == 1);
    CHECK(std::abs(fano_asymmetry(stack.spectra[7])) < 1e-3);
}
