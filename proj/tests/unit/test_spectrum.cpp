#include <cmath>

#include "doctest.h"

#include "cloaksim/errors.hpp"
#include "cloaksim/spectrum.hpp"

using namespace cloaksim;

TEST_CASE("linspace and ordering") {
    const auto x = linspace(-1.0, 1.0, 5);
    REQUIRE(x.size() == 5);
    CHECK(x.front() == -1.0);
    CHECK(x.back() == 1.0);
    CHECK(x[2] == doctest::Approx(0.0));
    CHECK(strictly_increasing(x));
    CHECK_FALSE(strictly_increasing(std::vector<double>{0.0, 1.0, 1.0}));
}

TEST_CASE("spectrum validation") {
    Spectrum s{{1.0, 2.0, 3.0}, {1.0, 0.5, 1.0}, SpectrumKind::transmission};
    CHECK_NOTHROW(s.validate());
    s.values[1] = -0.1;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.values = {1.0, 1.0};
    CHECK_THROWS_AS(s.validate(), DomainError);
    Spectrum unordered{{1.0, 3.0, 2.0}, {1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(unordered.validate(), DomainError);
    CHECK(to_string(SpectrumKind::fluorescence) == "fluorescence");
}

TEST_CASE("linear interpolation clamps") {
    const std::vector<double> x{0.0, 1.0, 2.0}, y{0.0, 10.0, 0.0};
    CHECK(interpolate_linear(x, y, 0.25) == doctest::Approx(2.5));
    CHECK(interpolate_linear(x, y, 1.5) == doctest::Approx(5.0));
    CHECK(interpolate_linear(x, y, -3.0) == 0.0);
    CHECK(interpolate_linear(x, y, 7.0) == 0.0);
}

TEST_CASE("peak width of a sampled Lorentzian") {
    const auto x = linspace(-10.0, 10.0, 4001);
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 + 3.0 / (1.0 + std::pow(2.0 * (v - 0.3) / 1.7, 2)));
    const PeakWidth p = measure_peak_width(x, y, 2.0);
    CHECK(p.center_hz == doctest::Approx(0.3).epsilon(1e-5));
    CHECK(p.fwhm_hz == doctest::Approx(1.7).epsilon(1e-4));
    CHECK(p.peak_height == doctest::Approx(3.0).epsilon(1e-5));
    const std::vector<double> flat(x.size(), 2.0);
    CHECK_THROWS_AS(measure_peak_width(x, flat, 2.0), DetectionError);
}
