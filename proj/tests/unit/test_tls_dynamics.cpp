#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "doctest.h"

#include "cloaksim/errors.hpp"
#include "cloaksim/tls_dynamics.hpp"
#include "cloaksim/units.hpp"
#include "support.hpp"

using namespace cloaksim;

namespace {

// Exact solution of the linear Bloch system by eigen-decomposition:
// x(t) = x_ss + V exp(L t) V^-1 (x0 - x_ss).
struct ExactBloch {
    Eigen::Vector3d steady;
    Eigen::Matrix3cd vectors;
    Eigen::Matrix3cd inverse;
    Eigen::Vector3cd values;

    ExactBloch(const DriveParams& d, const EmitterParams& e) {
        const double g1 = e.gamma1(), g2 = e.gamma2();
        Eigen::Matrix3d a;
        a << -g2, d.detuning, 0.0, -d.detuning, -g2, -d.rabi, 0.0, d.rabi, -g1;
        const Eigen::Vector3d b(0.0, 0.0, -g1);
        steady = a.fullPivLu().solve(-b);
        Eigen::EigenSolver<Eigen::Matrix3d> es(a);
        vectors = es.eigenvectors();
        values = es.eigenvalues();
        inverse = vectors.inverse();
    }

    double population(double t) const {
        const Eigen::Vector3d x0(0.0, 0.0, -1.0);
        Eigen::Vector3cd c = inverse * (x0 - steady).cast<std::complex<double>>();
        for (int i = 0; i < 3; ++i) c(i) *= std::exp(values(i) * t);
        const Eigen::Vector3cd x = vectors * c;
        return 0.5 * (1.0 + steady(2) + x(2).real());
    }
};

EmitterParams m1() { return EmitterParams::from_lifetime(1.4e-9, 87e6); }
EmitterParams m0() { return EmitterParams::from_lifetime(8.1e-9, 1.68e6); }

}  // namespace

TEST_CASE("lifetime and linewidth algebra") {
    CHECK(linewidth_from_lifetime(1.4e-9) == doctest::Approx(113.68e6).epsilon(1e-4));
    CHECK(std::abs(linewidth_from_lifetime(8.1e-9) - 19.65e6) < 0.01e6);
    CHECK(linewidth_from_lifetime(2.8e-9) == doctest::Approx(0.5 * linewidth_from_lifetime(1.4e-9)).epsilon(1e-15));
    CHECK(lifetime_ratio(8.1e-9, 1.4e-9) == doctest::Approx(5.79).epsilon(2e-3));
    CHECK(std::abs(total_fwhm(to_angular(114e6), to_angular(87e6)) - 288e6) < 1e-6);
    CHECK(total_fwhm(to_angular(114e6), 0.0) == doctest::Approx(114e6).epsilon(1e-15));
    const double x = pure_dephasing_from_widths(23e6, 19.65e6);
    CHECK(x == doctest::Approx(1.675e6).epsilon(1e-12));
    CHECK(total_fwhm(to_angular(19.65e6), to_angular(x)) == doctest::Approx(23e6).epsilon(1e-12));
    CHECK_THROWS_AS(linewidth_from_lifetime(0.0), DomainError);
    CHECK_THROWS_AS(pure_dephasing_from_widths(10e6, 20e6), DomainError);
}

TEST_CASE("emitter invariants") {
    const EmitterParams e = m1();
    CHECK(e.gamma2() == doctest::Approx(0.5 * e.gamma1() + e.pure_dephasing));
    EmitterParams bad = e;
    bad.branching_ratio = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = e;
    bad.pure_dephasing = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS(EmitterParams::from_lifetime(-1e-9), DomainError);
}

TEST_CASE("steady-state population") {
    const EmitterParams e = m1();
    const double g1 = e.gamma1(), g2 = e.gamma2();
    CHECK(steady_state_population({0.0, 0.0}, e) == 0.0);
    CHECK(steady_state_population({std::sqrt(g1 * g2), 0.0}, e) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(steady_state_population({std::sqrt(100.0 * g1 * g2), 0.0}, e) == doctest::Approx(0.4950495).epsilon(1e-6));
    for (double s : {0.01, 0.3, 2.0, 40.0}) {
        const double rho = steady_state_population({std::sqrt(s * g1 * g2), 0.3 * g2}, e);
        CHECK(rho >= 0.0);
        CHECK(rho < 0.5);
    }
}

TEST_CASE("integrated steady state matches the closed form") {
    for (const EmitterParams& e : {m1(), m0(), EmitterParams::from_lifetime(1.4e-9, 0.0)}) {
        for (double s : {0.05, 1.0, 30.0}) {
            for (double detuning : {0.0, 0.7}) {
                const DriveParams d{std::sqrt(s * e.gamma1() * e.gamma2()), detuning * e.gamma2()};
                const double settle = 50.0 / std::min(e.gamma1(), e.gamma2());
                const auto states = integrate_bloch(std::vector<double>{settle}, BlochState{}, d, e);
                CHECK(std::abs(states[0].excited_population() - steady_state_population(d, e)) < 1e-8);
                const BlochState ss = bloch_steady_state(d, e);
                CHECK(std::abs(ss.excited_population() - steady_state_population(d, e)) < 1e-14);
            }
        }
    }
}

TEST_CASE("integrator tracks the exact solution and stays physical") {
    const EmitterParams e = m1();
    const DriveParams d{5.0 * e.gamma1(), 0.4 * e.gamma1()};
    const ExactBloch exact(d, e);
    const auto t = linspace(0.0, 20.0 / e.gamma1(), 400);
    const auto states = integrate_bloch(t, BlochState{}, d, e);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const BlochState& s = states[i];
        CHECK(std::abs(s.excited_population() - exact.population(t[i])) < 1e-6);
        CHECK(std::sqrt(s.u * s.u + s.v * s.v + s.w * s.w) <= 1.0 + 1e-9);
        CHECK(s.excited_population() >= -1e-12);
        CHECK(s.excited_population() <= 1.0 + 1e-12);
    }
}

TEST_CASE("step bound is enforced") {
    const EmitterParams e = m1();
    const DriveParams d{e.gamma1(), 0.0};
    const double bound = max_bloch_step(d, e);
    CHECK(bound == doctest::Approx(1.0 / std::max(e.gamma1(), e.gamma2()) / 20.0));
    CHECK_THROWS_AS(integrate_bloch(std::vector<double>{1e-9}, BlochState{}, d, e, 2.0 * bound), AccuracyError);
    CHECK_NOTHROW(integrate_bloch(std::vector<double>{1e-9}, BlochState{}, d, e, 0.5 * bound));
}

TEST_CASE("g2 basic properties") {
    const EmitterParams e = m1();
    const DriveParams d{e.gamma1(), 0.0};
    const auto tau = linspace(0.0, 30.0 / e.gamma1(), 301);
    const auto g = g2(tau, d, e);
    CHECK(g.front() == 0.0);
    CHECK(std::abs(g.back() - 1.0) < 1e-3);
    CHECK_THROWS_AS(g2(tau, {0.0, 0.0}, e), DomainError);
}

TEST_CASE("weak-drive g2 matches the closed form") {
    for (const EmitterParams& e : {EmitterParams::from_lifetime(1.4e-9, 0.0), m1()}) {
        const double g1 = e.gamma1(), g2r = e.gamma2();
        const DriveParams d{0.003 * g1, 0.0};
        const auto tau = linspace(0.0, 15.0 / g1, 151);
        const auto g = g2(tau, d, e);
        for (std::size_t i = 0; i < tau.size(); ++i) {
            const double t = tau[i];
            const double closed = 1.0 - (g1 * std::exp(-g2r * t) - g2r * std::exp(-g1 * t)) / (g1 - g2r);
            CHECK(std::abs(g[i] - closed) < 1e-4);
        }
    }
    const EmitterParams e = EmitterParams::from_lifetime(8.1e-9, 0.0);
    const auto tau = linspace(0.0, 5e-8, 51);
    const auto g = g2(tau, {0.003 * e.gamma1(), 0.0}, e);
    for (std::size_t i = 0; i < tau.size(); ++i) {
        CHECK(std::abs(g[i] - std::pow(1.0 - std::exp(-0.5 * e.gamma1() * tau[i]), 2)) < 1e-4);
    }
}

TEST_CASE("strong-drive g2 oscillates at the Rabi frequency") {
    const EmitterParams e = EmitterParams::from_lifetime(8.1e-9, 0.0);
    const double rabi = 5.0 * e.gamma1();
    const double period = two_pi / rabi;
    const auto tau = linspace(0.0, 4.0 * period, 8001);
    const auto g = g2(tau, {rabi, 0.0}, e);
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        if (g[i] > g[i - 1] && g[i] >= g[i + 1]) peaks.push_back(tau[i]);
    }
    REQUIRE(peaks.size() >= 3);
    CHECK(*std::max_element(g.begin(), g.end()) > 1.0);
    CHECK(std::abs((peaks[1] - peaks[0]) / period - 1.0) < 0.05);
    CHECK(std::abs((peaks[2] - peaks[1]) / period - 1.0) < 0.05);
    const ExactBloch exact({rabi, 0.0}, e);
    const double rho = steady_state_population({rabi, 0.0}, e);
    for (std::size_t i = 0; i < tau.size(); i += 100) CHECK(std::abs(g[i] - exact.population(tau[i]) / rho) < 1e-6);
}

TEST_CASE("background dilution") {
    const std::vector<double> g{0.0, 0.5, 1.0};
    CHECK(g2_with_background(g, 1.0) == g);
    const auto d = g2_with_background(g, 0.9);
    CHECK(d[0] == doctest::Approx(0.19).epsilon(1e-14));
    CHECK(g2_with_background(std::vector<double>{1.0}, 0.5)[0] == 1.0);
    CHECK_THROWS_AS(g2_with_background(g, 0.0), DomainError);
    CHECK_THROWS_AS(g2_with_background(g, 1.1), DomainError);
}

TEST_CASE("power-broadened width of the excitation spectrum") {
    const EmitterParams e = m1();
    const PowerCalibration cal{to_angular(50e6)};
    const double zero_power = total_fwhm(e.gamma1(), e.pure_dephasing);
    CHECK(power_broadened_fwhm(0.0, e) == doctest::Approx(zero_power).epsilon(1e-14));
    CHECK(power_broadened_fwhm(std::sqrt(3.0 * e.gamma1() * e.gamma2()), e) ==
          doctest::Approx(2.0 * zero_power).epsilon(1e-14));
    for (double s : {0.01, 0.1, 1.0, 3.0, 10.0, 100.0}) {
        const double rabi = std::sqrt(s * e.gamma1() * e.gamma2());
        const double power = std::pow(rabi / cal.rabi_per_sqrt_power, 2);
        const double width = power_broadened_fwhm(rabi, e);
        const auto grid = linspace(e.resonance_hz - 10.0 * width, e.resonance_hz + 10.0 * width, 4001);
        const Spectrum spec = excitation_spectrum(grid, power, cal, e);
        const PeakWidth p = measure_peak_width(spec.frequency_hz, spec.values, 0.0);
        CHECK(std::abs(p.fwhm_hz / width - 1.0) < 0.01);
        CHECK(std::abs(p.center_hz - e.resonance_hz) < 1e-3 * width);
    }
    const auto narrow = linspace(e.resonance_hz - zero_power, e.resonance_hz + zero_power, 101);
    CHECK_THROWS_AS(excitation_spectrum(narrow, 1.0, cal, e), CoverageError);
}

TEST_CASE("saturation curve") {
    const EmitterParams e = m1();
    const PowerCalibration cal{to_angular(50e6)};
    const DetectionParams det{2e-3, true};
    const double r_inf = saturated_rate(e, det);
    CHECK(r_inf == doctest::Approx(0.5 * 2e-3 * e.radiative_rate * (1.0 - 0.44)));
    const double p_sat = e.gamma1() * e.gamma2() / std::pow(cal.rabi_per_sqrt_power, 2);
    const auto powers = linspace(0.0, 50.0 * p_sat, 201);
    const auto rates = saturation_curve(powers, e, cal, det);
    CHECK(rates.front() == 0.0);
    for (std::size_t i = 1; i < rates.size(); ++i) CHECK(rates[i] > rates[i - 1]);
    for (std::size_t i = 1; i + 1 < rates.size(); ++i) CHECK(rates[i + 1] - 2.0 * rates[i] + rates[i - 1] < 0.0);
    CHECK(saturation_curve(std::vector<double>{p_sat}, e, cal, det)[0] == doctest::Approx(0.5 * r_inf).epsilon(1e-12));
    CHECK(rates.back() < r_inf);

    const EmitterParams fast = EmitterParams::from_lifetime(1.4e-9), slow = EmitterParams::from_lifetime(8.1e-9);
    const double ratio = saturated_rate(fast, det) / saturated_rate(slow, det);
    CHECK(ratio == doctest::Approx(8.1 / 1.4).epsilon(1e-12));
    CHECK(std::abs(7.7 / 1.6 - 5.0) < 0.25);
}
