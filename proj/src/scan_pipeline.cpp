#include "cloaksim/scan_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cloaksim/errors.hpp"
#include "cloaksim/parallel.hpp"
#include "cloaksim/random.hpp"

namespace cloaksim {

std::vector<double> ScanConfig::frequency_axis() const {
    std::vector<double> axis(n_bins);
    const double bw = bin_width_hz();
    for (std::size_t i = 0; i < n_bins; ++i) {
        axis[i] = -0.5 * span_hz + (static_cast<double>(i) + 0.5) * bw;
    }
    return axis;
}

void ScanConfig::validate() const {
    if (!(span_hz > 0.0)) throw DomainError("scan span must be positive");
    if (!(scan_rate_hz_per_s > 0.0)) throw DomainError("scan rate must be positive");
    if (n_bins < 16) throw DomainError("scans need at least 16 bins");
    if (n_scans < 1) throw DomainError("need at least one scan");
    if (!(mean_peak_counts >= 0.0) || !(baseline_counts >= 0.0)) {
        throw DomainError("counts must be non-negative");
    }
    if (bin_oversampling < 1) throw DomainError("bin oversampling must be at least 1");
}

Lineshape lorentzian_lineshape(double fwhm_hz) {
    if (!(fwhm_hz > 0.0)) throw DomainError("linewidth must be positive");
    return {[fwhm_hz](double detuning) {
                const double u = 2.0 * detuning / fwhm_hz;
                return 1.0 / (1.0 + u * u);
            },
            fwhm_hz};
}

ScanSet simulate_scan_set(const ScanConfig& config, const JitterModel& jitter,
                          const Lineshape& lineshape, std::uint64_t seed, unsigned threads) {
    config.validate();
    if (!(jitter.sigma_hz >= 0.0)) throw DomainError("jitter sigma must be non-negative");
    if (!(lineshape.fwhm_hz >= 3.0 * config.bin_width_hz())) {
        throw SamplingError("line FWHM is under-resolved (fewer than 3 bins)");
    }

    ScanSet set;
    set.seed = seed;
    set.config = config;
    set.jitter = jitter;

    const std::size_t n = config.n_scans;
    std::vector<double> steps(n);
    for (std::size_t k = 0; k < n; ++k) {
        Rng rng = make_rng(seed, "jitter", k);
        std::normal_distribution<double> gauss(0.0, 1.0);
        steps[k] = jitter.sigma_hz * gauss(rng);
    }
    set.true_centers_hz.resize(n);
    double walk = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (jitter.kind == JitterKind::random_walk) {
            walk += steps[k];
            set.true_centers_hz[k] = walk;
        } else {
            set.true_centers_hz[k] = steps[k];
        }
    }

    const std::vector<double> axis = config.frequency_axis();
    const double bw = config.bin_width_hz();
    const std::size_t sub = config.bin_oversampling;
    set.scans.resize(n);
    parallel_for(n, threads, [&](std::size_t k) {
        Rng rng = make_rng(seed, "counts", k);
        Scan& scan = set.scans[k];
        scan.frequency_hz = axis;
        scan.counts.resize(axis.size());
        for (std::size_t i = 0; i < axis.size(); ++i) {
            double profile = 0.0;
            for (std::size_t s = 0; s < sub; ++s) {
                const double nu = axis[i] + bw * ((static_cast<double>(s) + 0.5) / static_cast<double>(sub) - 0.5);
                profile += lineshape.profile(nu - set.true_centers_hz[k]);
            }
            const double mean = config.baseline_counts +
                                config.mean_peak_counts * profile / static_cast<double>(sub);
            scan.counts[i] = config.noiseless ? mean : draw_counts(rng, mean);
        }
    });
    return set;
}

namespace {

std::vector<double> moving_average(const std::vector<double>& y, std::size_t width) {
    const std::size_t half = width / 2;
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const std::size_t a = i >= half ? i - half : 0;
        const std::size_t b = std::min(y.size() - 1, i + half);
        double s = 0.0;
        for (std::size_t j = a; j <= b; ++j) s += y[j];
        out[i] = s / static_cast<double>(b - a + 1);
    }
    return out;
}

std::size_t odd_width(double bins) {
    auto w = static_cast<std::size_t>(std::lround(std::max(3.0, bins)));
    return w % 2 == 0 ? w + 1 : w;
}

}  // namespace

double estimate_midpoint(const Scan& scan, const MidpointOptions& options) {
    const auto& x = scan.frequency_hz;
    const auto& y = scan.counts;
    const std::size_t n = y.size();
    if (n < 16 || x.size() != n) throw DetectionError("scan too short for midpoint detection");
    const double bw = (x.back() - x.front()) / static_cast<double>(n - 1);

    const std::size_t edge = std::max<std::size_t>(2, n / 10);
    double baseline = 0.0;
    for (std::size_t i = 0; i < edge; ++i) baseline += y[i] + y[n - 1 - i];
    baseline /= static_cast<double>(2 * edge);

    std::size_t width = 3;
    if (options.fwhm_hint_hz) {
        width = odd_width(*options.fwhm_hint_hz / 5.0 / bw);
    } else {
        const std::vector<double> rough = moving_average(y, 3);
        const double top = *std::max_element(rough.begin(), rough.end());
        if (top > baseline) {
            try {
                width = odd_width(measure_peak_width(x, rough, baseline).fwhm_hz / 5.0 / bw);
            } catch (const DetectionError&) {
                width = 3;
            }
        }
    }
    const std::vector<double> smooth = moving_average(y, width);
    const double peak = *std::max_element(smooth.begin(), smooth.end());
    const double threshold = baseline + options.threshold_sigmas * std::sqrt(std::max(baseline, 0.0));
    if (!(peak > threshold)) throw DetectionError("no significant peak in scan");
    return measure_peak_width(x, smooth, baseline).center_hz;
}

Spectrum AveragedSpectrum::to_spectrum() const {
    return Spectrum{frequency_hz, mean_counts, SpectrumKind::fluorescence};
}

std::pair<AveragedSpectrum, AlignmentDiagnostics> align_and_average(
    const ScanSet& set, const MidpointOptions& options, std::size_t min_accepted,
    unsigned threads) {
    if (set.scans.empty()) throw InsufficiencyError("empty scan set");
    const std::size_t n = set.scans.size();
    AlignmentDiagnostics diag;
    diag.midpoints_hz.assign(n, std::numeric_limits<double>::quiet_NaN());
    parallel_for(n, threads, [&](std::size_t k) {
        try {
            diag.midpoints_hz[k] = estimate_midpoint(set.scans[k], options);
        } catch (const DetectionError&) {
        }
    });

    std::vector<std::size_t> accepted;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::isfinite(diag.midpoints_hz[k])) accepted.push_back(k);
    }
    diag.accepted = accepted.size();
    diag.rejected = n - accepted.size();
    if (accepted.size() < min_accepted) {
        throw InsufficiencyError("only " + std::to_string(accepted.size()) +
                                 " scans passed peak detection");
    }

    double mean = 0.0;
    for (std::size_t k : accepted) mean += diag.midpoints_hz[k];
    mean /= static_cast<double>(accepted.size());
    double var = 0.0;
    for (std::size_t k : accepted) var += std::pow(diag.midpoints_hz[k] - mean, 2);
    diag.midpoint_mean_hz = mean;
    diag.midpoint_scatter_hz =
        accepted.size() > 1 ? std::sqrt(var / static_cast<double>(accepted.size() - 1)) : 0.0;

    const std::vector<double>& axis = set.scans.front().frequency_hz;
    const double bw = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
    const double tol = 1e-6 * bw;
    double max_shift = -std::numeric_limits<double>::infinity();
    double min_shift = std::numeric_limits<double>::infinity();
    for (std::size_t k : accepted) {
        const double shift = diag.midpoints_hz[k] - mean;
        max_shift = std::max(max_shift, shift);
        min_shift = std::min(min_shift, shift);
    }

    AveragedSpectrum out;
    out.reference_hz = mean;
    out.scans_used = accepted.size();
    for (double nu : axis) {
        if (nu + min_shift < axis.front() - tol || nu + max_shift > axis.back() + tol) {
            ++diag.dropped_edge_bins;
            continue;
        }
        double sum = 0.0;
        for (std::size_t k : accepted) {
            const Scan& scan = set.scans[k];
            sum += interpolate_linear(scan.frequency_hz, scan.counts,
                                      nu + (diag.midpoints_hz[k] - mean));
        }
        out.frequency_hz.push_back(nu);
        out.mean_counts.push_back(sum / static_cast<double>(accepted.size()));
    }
    if (out.frequency_hz.size() < 3) {
        throw InsufficiencyError("midpoint scatter leaves no common frequency coverage");
    }
    return {std::move(out), std::move(diag)};
}

AveragedSpectrum naive_average(const ScanSet& set) {
    if (set.scans.empty()) throw InsufficiencyError("empty scan set");
    AveragedSpectrum out;
    out.frequency_hz = set.scans.front().frequency_hz;
    out.mean_counts.assign(out.frequency_hz.size(), 0.0);
    for (const Scan& scan : set.scans) {
        if (scan.counts.size() != out.mean_counts.size()) {
            throw DomainError("scans differ in bin count");
        }
        for (std::size_t i = 0; i < scan.counts.size(); ++i) out.mean_counts[i] += scan.counts[i];
    }
    for (double& v : out.mean_counts) v /= static_cast<double>(set.scans.size());
    out.scans_used = set.scans.size();
    return out;
}

}  // namespace cloaksim
