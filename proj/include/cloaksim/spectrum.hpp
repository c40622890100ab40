#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cloaksim {

enum class SpectrumKind { transmission, fluorescence };

std::string_view to_string(SpectrumKind kind);

// Sampled spectrum on an ordinary-frequency axis (Hz).
struct Spectrum {
    std::vector<double> frequency_hz;
    std::vector<double> values;
    SpectrumKind kind = SpectrumKind::transmission;

    std::size_t size() const { return values.size(); }
    // Throws DomainError on unordered axis, length mismatch or negative transmission.
    void validate() const;
};

std::vector<double> linspace(double first, double last, std::size_t n);

bool strictly_increasing(std::span<const double> x);

// Piecewise-linear interpolation; clamps outside [x.front(), x.back()].
double interpolate_linear(std::span<const double> x, std::span<const double> y, double xq);

// Half-maximum crossing analysis of the dominant peak of y - baseline.
// Crossings are located by linear interpolation between samples.
struct PeakWidth {
    double center_hz = 0.0;  // midpoint of the two crossings
    double fwhm_hz = 0.0;
    double left_hz = 0.0;
    double right_hz = 0.0;
    double peak_height = 0.0;  // above baseline
    std::size_t peak_index = 0;
};

// Throws DetectionError if there is no positive peak or a crossing is missing.
PeakWidth measure_peak_width(std::span<const double> x, std::span<const double> y,
                             double baseline);

}  // namespace cloaksim
