#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "cloaksim/errors.hpp"
#include "cloaksim/fit_models.hpp"
#include "support.hpp"

using namespace cloaksim;

namespace {

Spectrum lorentz_spectrum(double center, double fwhm, double amp, double base, std::size_t n = 301) {
    Spectrum s;
    s.frequency_hz = linspace(-3e9, 3e9, n);
    for (double nu : s.frequency_hz) s.values.push_back(lorentzian(nu, center, fwhm, amp, base));
    s.kind = SpectrumKind::fluorescence;
    return s;
}

}  // namespace

TEST_CASE("Lorentzian shape") {
    CHECK(lorentzian(1.0, 1.0, 2.0, 3.0, 0.5) == doctest::Approx(3.5));
    CHECK(lorentzian(2.0, 1.0, 2.0, 3.0, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("Lorentzian fit recovers noiseless peaks and dips") {
    for (double amp : {40.0, -0.3}) {
        const Spectrum s = lorentz_spectrum(120e6, 290e6, amp, 1.0);
        const FitResult f = fit_lorentzian(s);
        REQUIRE(f.converged);
        CHECK(f.parameter("center_hz") == doctest::Approx(120e6).epsilon(1e-8));
        CHECK(f.parameter("fwhm_hz") == doctest::Approx(290e6).epsilon(1e-8));
        CHECK(f.parameter("amplitude") == doctest::Approx(amp).epsilon(1e-8));
        CHECK(f.parameter("baseline") == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("Lorentzian standard errors match the Monte-Carlo scatter") {
    const Spectrum truth = lorentz_spectrum(0.0, 290e6, 50.0, 5.0, 256);
    std::mt19937_64 rng(11);
    std::vector<double> centers, errors;
    for (int trial = 0; trial < 200; ++trial) {
        Spectrum s = truth;
        for (double& v : s.values) v = static_cast<double>(std::poisson_distribution<int>(v)(rng));
        const FitResult f = fit_lorentzian(s, {}, Weighting::counts);
        REQUIRE(f.converged);
        centers.push_back(f.parameter("center_hz"));
        errors.push_back(f.error("center_hz"));
    }
    const double scatter = testing::stddev(centers);
    CHECK(testing::mean(errors) == doctest::Approx(scatter).epsilon(0.2));
    CHECK(std::abs(testing::mean(centers)) < 3.0 * scatter / std::sqrt(200.0));
}

TEST_CASE("flat data is reported as a degenerate fit") {
    Spectrum s;
    s.frequency_hz = linspace(-1e9, 1e9, 101);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(10.0, 0.1);
    for (std::size_t i = 0; i < 101; ++i) s.values.push_back(n(rng));
    const FitResult f = fit_lorentzian(s);
    CHECK_FALSE(f.converged);
    CHECK_FALSE(f.warnings.empty());

    Spectrum tiny;
    tiny.frequency_hz = {0, 1, 2};
    tiny.values = {1, 2, 1};
    CHECK_THROWS_AS(fit_lorentzian(tiny), DomainError);
}

TEST_CASE("dispersive profile limits") {
    CHECK(dispersive_profile(0.0, 0.0, 1e8, 0.5, 0.0, 2.0) == doctest::Approx(2.0 * 0.25));
    CHECK(dispersive_profile(1e12, 0.0, 1e8, 0.5, 0.0, 2.0) == doctest::Approx(2.0).epsilon(1e-6));
    // a quarter-wave phase gives an antisymmetric feature about the center
    const double up = dispersive_profile(5e7, 0.0, 1e8, 0.3, 0.5 * std::numbers::pi, 1.0) - 1.0;
    const double dn = dispersive_profile(-5e7, 0.0, 1e8, 0.3, 0.5 * std::numbers::pi, 1.0) - 1.0;
    CHECK(up * dn < 0.0);
}

TEST_CASE("dispersive fit recovers phase and depth") {
    for (double phase : {0.0, 0.8, -1.2}) {
        Spectrum s;
        s.frequency_hz = linspace(-2e9, 2e9, 401);
        for (double nu : s.frequency_hz) s.values.push_back(dispersive_profile(nu, 5e7, 3e8, 0.4, phase, 1.0));
        const FitResult f = fit_dispersive(s);
        CHECK(f.converged);
        CHECK(f.parameter("zeta") == doctest::Approx(0.4).epsilon(1e-6));
        CHECK(f.parameter("phase_rad") == doctest::Approx(phase).epsilon(1e-6));
        CHECK(f.parameter("fwhm_hz") == doctest::Approx(3e8).epsilon(1e-6));
    }
}

TEST_CASE("saturation curve") {
    CHECK(saturation_model(2.0, 10.0, 2.0) == doctest::Approx(5.0));
    CHECK(saturation_model(0.0, 10.0, 2.0) == 0.0);
    std::vector<double> p, r;
    for (double x : {0.1, 0.3, 1.0, 3.0, 10.0, 30.0}) {
        p.push_back(x);
        r.push_back(saturation_model(x, 4e5, 2.5));
    }
    const FitResult f = fit_saturation(p, r);
    CHECK(f.converged);
    CHECK(f.parameter("saturated_rate") == doctest::Approx(4e5).epsilon(1e-7));
    CHECK(f.parameter("saturation_power") == doctest::Approx(2.5).epsilon(1e-7));
    CHECK_THROWS_AS(fit_saturation(std::vector<double>{1, 2}, std::vector<double>{1, 2}), DomainError);
}

TEST_CASE("counts weighting") {
    const std::vector<double> d = {0.0, 0.5, 4.0};
    const auto w = make_weights(d, Weighting::counts);
    CHECK(w == std::vector<double>{1.0, 1.0, 0.25});
    CHECK(make_weights(d, Weighting::uniform).empty());
}

TEST_CASE("packaged model Jacobians agree with central differences") {
    const Spectrum s = lorentz_spectrum(1e7, 290e6, 30.0, 4.0);
    const FitProblem lp = make_lorentzian_problem(s, {0.0, 250e6, 25.0, 3.0}, Weighting::counts);
    CHECK(testing::jacobian_mismatch(lp, lp.initial) < 1e-5);

    const std::vector<double> d0 = {2e7, 2.5e8, 0.3, 0.7, 1.1};
    const FitProblem dp = make_dispersive_problem(s, d0);
    CHECK(testing::jacobian_mismatch(dp, d0) < 1e-5);

    const std::vector<double> p = {0.1, 1.0, 10.0, 100.0};
    const std::vector<double> r = {1.0, 8.0, 30.0, 40.0};
    const std::vector<double> s0 = {45.0, 2.0};
    const FitProblem sp = make_saturation_problem(p, r, s0, Weighting::counts);
    CHECK(testing::jacobian_mismatch(sp, s0) < 1e-5);
}
