#include <cmath>
#include <numbers>

#include "doctest.h"

#include "cloaksim/beam_optics.hpp"
#include "cloaksim/errors.hpp"
#include "cloaksim/lineshape_model.hpp"
#include "cloaksim/units.hpp"
#include "support.hpp"

using namespace cloaksim;

TEST_CASE("gouy phase examples") {
    CHECK(gouy_phase(0.0, 500.0) == 0.0);
    CHECK(gouy_phase(500.0, 500.0) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-15));
    CHECK(gouy_phase(-1000.0, 500.0) == doctest::Approx(-1.1071487177940904).epsilon(1e-14));
    CHECK_THROWS_AS(gouy_phase(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(gouy_phase(1.0, -3.0), DomainError);
}

TEST_CASE("gouy phase is odd and bounded") {
    for (double z = -5000.0; z <= 5000.0; z += 37.5) {
        CHECK(gouy_phase(-z, 420.0) == -gouy_phase(z, 420.0));
        CHECK(std::abs(gouy_phase(z, 420.0)) < std::numbers::pi / 2);
    }
}

TEST_CASE("axial envelope") {
    CHECK(axial_envelope(0.0, 300.0) == 1.0);
    CHECK(axial_envelope(300.0, 300.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(axial_envelope(900.0, 300.0) == doctest::Approx(0.31622776601683794).epsilon(1e-14));
    double previous = 1.0;
    for (double z = 10.0; z <= 4000.0; z += 10.0) {
        const double a = axial_envelope(z, 300.0);
        CHECK(a == axial_envelope(-z, 300.0));
        CHECK(a < previous);
        CHECK(a > 0.0);
        previous = a;
    }
    CHECK_THROWS_AS(axial_envelope(1.0, 0.0), DomainError);
}

TEST_CASE("sigma0") {
    CHECK(sigma0(740.0) == doctest::Approx(3.0 * 740.0 * 740.0 / (2.0 * std::numbers::pi)).epsilon(1e-15));
    CHECK(sigma0(740.0) * 1e-6 == doctest::Approx(0.2614).epsilon(1e-3));
    CHECK(testing::rel_diff(sigma0(2.0 * 633.0), 4.0 * sigma0(633.0)) < 1e-12);
    CHECK_THROWS_AS(sigma0(0.0), DomainError);
}

TEST_CASE("zeta from dip") {
    CHECK(zeta_from_dip(0.04) == doctest::Approx(0.0202041028867).epsilon(1e-10));
    CHECK(zeta_from_dip(0.5) == doctest::Approx(0.292893218813).epsilon(1e-10));
    CHECK(zeta_from_dip(0.0) == 0.0);
    CHECK_THROWS_AS(zeta_from_dip(1.0), DomainError);
    CHECK_THROWS_AS(zeta_from_dip(-0.1), DomainError);
    for (double d : {0.0001, 0.04, 0.2, 0.5, 0.9, 0.999}) {
        CHECK(testing::rel_diff(dip_from_zeta(zeta_from_dip(d)), d) < 1e-12);
    }
}

TEST_CASE("zeta round trip through the forward transmission") {
    const FocusParams focus = make_focus(740.0, 270.0);
    const OscillatorParams osc = OscillatorParams::from_hz(404.96e12, 50e6);
    const std::vector<double> grid{404.96e12};
    for (double d : {0.04, 0.5}) {
        const Spectrum s = single_scatterer_transmission(grid, osc, zeta_from_dip(d), 0.0, focus);
        CHECK(testing::rel_diff(1.0 - s.values[0], d) < 1e-12);
    }
}

TEST_CASE("focus defaults") {
    const double w0 = beam_waist_from_fwhm(270.0);
    CHECK(w0 == doctest::Approx(270.0 / std::sqrt(2.0 * std::numbers::ln2)).epsilon(1e-15));
    const FocusParams f = make_focus(740.0, 270.0);
    CHECK(f.rayleigh_range_nm == doctest::Approx(std::numbers::pi * w0 * w0 * 1.5 / 740.0).epsilon(1e-14));
    CHECK(make_focus(740.0, 270.0, 1.5, 800.0).rayleigh_range_nm == 800.0);
    FocusParams bad = f;
    bad.wavelength_nm = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}
