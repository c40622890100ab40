#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "cloaksim/errors.hpp"
#include "cloaksim/fit_models.hpp"
#include "cloaksim/scan_pipeline.hpp"
#include "support.hpp"

using namespace cloaksim;

namespace {

ScanConfig defaults() { return ScanConfig{}; }

}  // namespace

TEST_CASE("configuration arithmetic") {
    const ScanConfig c = defaults();
    CHECK(c.dwell_time_s() == doctest::Approx(1.171875e-3).epsilon(1e-12));
    const auto axis = c.frequency_axis();
    CHECK(axis.size() == 256);
    CHECK(axis[1] - axis[0] == doctest::Approx(c.bin_width_hz()));
    CHECK(axis.front() + axis.back() == doctest::Approx(0.0).epsilon(1e-9));
    ScanConfig bad = c;
    bad.n_bins = 8;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("noiseless scans without jitter reproduce the bin-averaged lineshape") {
    ScanConfig c = defaults();
    c.noiseless = true;
    c.n_scans = 5;
    c.bin_oversampling = 1;
    const Lineshape l = lorentzian_lineshape(290e6);
    const ScanSet set = simulate_scan_set(c, {}, l, 3);
    const auto axis = c.frequency_axis();
    for (const Scan& s : set.scans) {
        for (std::size_t i = 0; i < axis.size(); ++i) {
            CHECK(s.counts[i] == doctest::Approx(c.baseline_counts + c.mean_peak_counts * l.profile(axis[i])));
        }
    }
}

TEST_CASE("under-resolved lines are rejected") {
    CHECK_THROWS_AS(simulate_scan_set(defaults(), {}, lorentzian_lineshape(23e6), 1), SamplingError);
}

TEST_CASE("scan sets are deterministic and independent of thread count") {
    const ScanConfig c = defaults();
    const JitterModel j{JitterKind::gaussian_per_scan, 100e6};
    const Lineshape l = lorentzian_lineshape(290e6);
    const ScanSet a = simulate_scan_set(c, j, l, 42, 1);
    const ScanSet b = simulate_scan_set(c, j, l, 42, 4);
    const ScanSet other = simulate_scan_set(c, j, l, 43, 1);
    REQUIRE(a.scans.size() == b.scans.size());
    for (std::size_t k = 0; k < a.scans.size(); ++k) CHECK(a.scans[k].counts == b.scans[k].counts);
    CHECK(a.true_centers_hz == b.true_centers_hz);
    CHECK(a.scans[0].counts != other.scans[0].counts);
    for (const Scan& s : a.scans) {
        for (double v : s.counts) CHECK(v == std::floor(v));
    }
}

TEST_CASE("random-walk jitter accumulates") {
    const JitterModel walk{JitterKind::random_walk, 10e6};
    ScanConfig c = defaults();
    c.n_scans = 400;
    c.noiseless = true;
    const ScanSet s = simulate_scan_set(c, walk, lorentzian_lineshape(290e6), 9);
    const JitterModel gauss{JitterKind::gaussian_per_scan, 10e6};
    const ScanSet g = simulate_scan_set(c, gauss, lorentzian_lineshape(290e6), 9);
    for (std::size_t k = 1; k < c.n_scans; ++k) {
        CHECK(s.true_centers_hz[k] - s.true_centers_hz[k - 1] == doctest::Approx(g.true_centers_hz[k]));
    }
}

TEST_CASE("mean counts scale with the configured peak counts") {
    ScanConfig c = defaults();
    c.baseline_counts = 0.0;
    const Lineshape l = lorentzian_lineshape(290e6);
    const AveragedSpectrum one = naive_average(simulate_scan_set(c, {}, l, 5));
    c.mean_peak_counts *= 2.0;
    const AveragedSpectrum two = naive_average(simulate_scan_set(c, {}, l, 6));
    const double p1 = *std::max_element(one.mean_counts.begin(), one.mean_counts.end());
    const double p2 = *std::max_element(two.mean_counts.begin(), two.mean_counts.end());
    CHECK(std::abs(p2 / p1 - 2.0) < 0.04);
}

TEST_CASE("midpoint estimates on noiseless peaks") {
    ScanConfig c = defaults();
    c.noiseless = true;
    c.n_scans = 1;
    const double bw = c.bin_width_hz();
    const Lineshape l = lorentzian_lineshape(290e6);
    const auto axis = c.frequency_axis();

    JitterModel none;
    const ScanSet on_bin = simulate_scan_set(c, none, l, 1);
    CHECK(std::abs(estimate_midpoint(on_bin.scans[0]) - 0.0) < 1e-3 * bw);

    for (double offset : {axis[130], axis[131] + 0.5 * bw, axis[120] + 0.3 * bw}) {
        Scan s;
        s.frequency_hz = axis;
        for (double nu : axis) s.counts.push_back(c.baseline_counts + c.mean_peak_counts * l.profile(nu - offset));
        CHECK(std::abs(estimate_midpoint(s) - offset) < 1e-2 * bw);
        MidpointOptions hint;
        hint.fwhm_hint_hz = 290e6;
        CHECK(std::abs(estimate_midpoint(s, hint) - offset) < 1e-2 * bw);
    }

    Scan flat;
    flat.frequency_hz = axis;
    flat.counts.assign(axis.size(), 5.0);
    CHECK_THROWS_AS(estimate_midpoint(flat), DetectionError);
}

TEST_CASE("alignment without jitter leaves noiseless data unchanged") {
    ScanConfig c = defaults();
    c.noiseless = true;
    c.n_scans = 40;
    const ScanSet set = simulate_scan_set(c, {}, lorentzian_lineshape(290e6), 2);
    const auto [aligned, diag] = align_and_average(set);
    const AveragedSpectrum naive = naive_average(set);
    CHECK(diag.rejected == 0);
    CHECK(diag.dropped_edge_bins == 0);
    REQUIRE(aligned.mean_counts.size() == naive.mean_counts.size());
    for (std::size_t i = 0; i < naive.mean_counts.size(); ++i) {
        CHECK(std::abs(aligned.mean_counts[i] - set.scans[0].counts[i]) < 1e-6);
        CHECK(std::abs(aligned.mean_counts[i] - naive.mean_counts[i]) < 1e-9);
    }
}

TEST_CASE("naive average of one scan returns it") {
    ScanConfig c = defaults();
    c.n_scans = 1;
    const ScanSet set = simulate_scan_set(c, {}, lorentzian_lineshape(290e6), 4);
    CHECK(naive_average(set).mean_counts == set.scans[0].counts);
}

TEST_CASE("naive average broadening follows the convolution with the jitter law") {
    ScanConfig c = defaults();
    c.noiseless = true;
    c.n_scans = 4000;
    const double fwhm = 290e6, sigma = 200e6;
    const ScanSet set = simulate_scan_set(c, {JitterKind::gaussian_per_scan, sigma}, lorentzian_lineshape(fwhm), 8);
    const AveragedSpectrum naive = naive_average(set);
    const double measured = measure_peak_width(naive.frequency_hz, naive.mean_counts, c.baseline_counts).fwhm_hz;

    // Lorentzian convolved with the Gaussian jitter law on a fine grid.
    const auto x = linspace(-3e9, 3e9, 6001);
    std::vector<double> voigt;
    for (double nu : x) {
        double s = 0.0;
        for (double t = -6.0 * sigma; t <= 6.0 * sigma; t += sigma / 50.0) {
            const double u = 2.0 * (nu - t) / fwhm;
            s += std::exp(-0.5 * t * t / (sigma * sigma)) / (1.0 + u * u);
        }
        voigt.push_back(s);
    }
    const double expected = measure_peak_width(x, voigt, 0.0).fwhm_hz;
    CHECK(std::abs(measured / expected - 1.0) < 0.03);
}

TEST_CASE("aligned average recovers the homogeneous width") {
    const ScanConfig c = defaults();
    const double fwhm = 290e6;
    const ScanSet set =
        simulate_scan_set(c, {JitterKind::gaussian_per_scan, fwhm}, lorentzian_lineshape(fwhm), 2024);
    MidpointOptions opt;
    opt.fwhm_hint_hz = fwhm;
    const auto [aligned, diag] = align_and_average(set, opt);
    const FitResult fa = fit_lorentzian(aligned.to_spectrum(), {}, Weighting::counts);
    const FitResult fn = fit_lorentzian(naive_average(set).to_spectrum(), {}, Weighting::counts);
    CHECK(std::abs(fa.parameter("fwhm_hz") / fwhm - 1.0) < 0.05);
    CHECK(fn.parameter("fwhm_hz") / fwhm > 1.2);
    CHECK(diag.midpoint_scatter_hz == doctest::Approx(fwhm).epsilon(0.15));
    // Residuals consistent with shot noise on the mean of the accepted scans.
    const double chi2 = fa.reduced_chi_square() * static_cast<double>(aligned.scans_used);
    CHECK(chi2 > 0.3);
    CHECK(chi2 < 1.5);
}

TEST_CASE("alignment bias on jitter-free noisy data stays below 3%") {
    const ScanConfig c = defaults();
    const double fwhm = 290e6;
    std::vector<double> ratios;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ScanSet set = simulate_scan_set(c, {}, lorentzian_lineshape(fwhm), 100 + seed);
        const auto result = align_and_average(set);
        ratios.push_back(fit_lorentzian(result.first.to_spectrum(), {}, Weighting::counts).parameter("fwhm_hz") / fwhm);
    }
    MESSAGE("mean aligned/true width on jitter-free data: " << testing::mean(ratios));
    CHECK(std::abs(testing::mean(ratios) - 1.0) < 0.03);
}

TEST_CASE("too few detectable scans") {
    ScanConfig c = defaults();
    c.n_scans = 12;
    c.mean_peak_counts = 0.0;
    const ScanSet set = simulate_scan_set(c, {}, lorentzian_lineshape(290e6), 4);
    CHECK_THROWS_AS(align_and_average(set), InsufficiencyError);
}
