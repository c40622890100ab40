#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cloaksim/spectrum.hpp"

namespace cloaksim {

struct ScanConfig {
    double scan_rate_hz_per_s = 20e9;
    double span_hz = 6e9;
    std::size_t n_bins = 256;
    std::size_t n_scans = 240;
    double mean_peak_counts = 50.0;  // per bin, at line center, above baseline
    double baseline_counts = 5.0;    // per bin
    bool noiseless = false;          // keep expected counts instead of drawing
    std::size_t bin_oversampling = 5;

    double bin_width_hz() const { return span_hz / static_cast<double>(n_bins); }
    double dwell_time_s() const { return span_hz / scan_rate_hz_per_s / static_cast<double>(n_bins); }
    // Bin-center frequencies, relative to the nominal line position.
    std::vector<double> frequency_axis() const;
    void validate() const;
};

enum class JitterKind { gaussian_per_scan, random_walk };

struct JitterModel {
    JitterKind kind = JitterKind::gaussian_per_scan;
    double sigma_hz = 0.0;  // per-scan std, or per-step std for the random walk
};

// Peak-normalized line profile as a function of detuning from its center (Hz).
struct Lineshape {
    std::function<double(double)> profile;
    double fwhm_hz = 0.0;
};

Lineshape lorentzian_lineshape(double fwhm_hz);

struct Scan {
    std::vector<double> frequency_hz;
    std::vector<double> counts;
};

struct ScanSet {
    std::vector<Scan> scans;
    std::vector<double> true_centers_hz;  // synthetic data only
    std::uint64_t seed = 0;
    ScanConfig config;
    JitterModel jitter;
};

// Each scan draws from the sub-stream (seed, scan index), so the set is
// identical for any thread count. Throws SamplingError when the line is
// narrower than three bins.
ScanSet simulate_scan_set(const ScanConfig& config, const JitterModel& jitter,
                          const Lineshape& lineshape, std::uint64_t seed, unsigned threads = 1);

struct MidpointOptions {
    std::optional<double> fwhm_hint_hz;  // sets the smoothing width; estimated if absent
    double threshold_sigmas = 3.0;       // peak must exceed baseline + k sqrt(baseline)
};

// Center of the half-maximum crossings of the smoothed trace.
// Throws DetectionError when no significant peak is present.
double estimate_midpoint(const Scan& scan, const MidpointOptions& options = {});

struct AveragedSpectrum {
    std::vector<double> frequency_hz;
    std::vector<double> mean_counts;
    double reference_hz = 0.0;  // common line position the scans were aligned to
    std::size_t scans_used = 0;

    Spectrum to_spectrum() const;
};

struct AlignmentDiagnostics {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    double midpoint_mean_hz = 0.0;
    double midpoint_scatter_hz = 0.0;  // sample standard deviation
    std::vector<double> midpoints_hz;  // NaN for rejected scans
    std::size_t dropped_edge_bins = 0;
};

// Shifts every accepted scan so its midpoint lands on the mean midpoint, resamples
// it onto the common axis by linear interpolation and averages. Bins not covered
// by every shifted scan are dropped. Throws InsufficiencyError if fewer than
// `min_accepted` scans pass detection.
std::pair<AveragedSpectrum, AlignmentDiagnostics> align_and_average(
    const ScanSet& set, const MidpointOptions& options = {}, std::size_t min_accepted = 10,
    unsigned threads = 1);

// Bin-wise mean without shifts.
AveragedSpectrum naive_average(const ScanSet& set);

}  // namespace cloaksim
