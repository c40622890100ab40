#include "cloaksim/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "cloaksim/errors.hpp"

namespace cloaksim {

std::string_view to_string(SpectrumKind kind) {
    return kind == SpectrumKind::transmission ? "transmission" : "fluorescence";
}

void Spectrum::validate() const {
    if (frequency_hz.size() != values.size()) {
        throw DomainError("spectrum axis and values differ in length");
    }
    if (!strictly_increasing(frequency_hz)) {
        throw DomainError("spectrum frequency axis must be strictly increasing");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw DomainError("spectrum contains non-finite values");
        if (kind == SpectrumKind::transmission && v < 0.0) {
            throw DomainError("transmission must be non-negative");
        }
    }
}

std::vector<double> linspace(double first, double last, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = first;
        return out;
    }
    const double step = (last - first) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = first + step * static_cast<double>(i);
    if (n > 1) out.back() = last;
    return out;
}

bool strictly_increasing(std::span<const double> x) {
    return std::adjacent_find(x.begin(), x.end(), [](double a, double b) { return !(a < b); }) ==
           x.end();
}

double interpolate_linear(std::span<const double> x, std::span<const double> y, double xq) {
    if (x.empty()) throw DomainError("interpolation on an empty table");
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double t = (xq - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
}

PeakWidth measure_peak_width(std::span<const double> x, std::span<const double> y,
                             double baseline) {
    if (x.size() != y.size() || x.size() < 3) throw DetectionError("too few samples for a peak");
    const auto top = std::max_element(y.begin(), y.end());
    const std::size_t k = static_cast<std::size_t>(top - y.begin());
    const double height = *top - baseline;
    if (!(height > 0.0)) throw DetectionError("no peak above baseline");
    const double half = baseline + 0.5 * height;

    std::size_t i = k;
    while (i > 0 && y[i - 1] > half) --i;
    if (i == 0) throw DetectionError("left half-maximum crossing outside the data");
    const double left = x[i - 1] + (half - y[i - 1]) / (y[i] - y[i - 1]) * (x[i] - x[i - 1]);

    std::size_t j = k;
    while (j + 1 < y.size() && y[j + 1] > half) ++j;
    if (j + 1 == y.size()) throw DetectionError("right half-maximum crossing outside the data");
    const double right = x[j] + (y[j] - half) / (y[j] - y[j + 1]) * (x[j + 1] - x[j]);

    PeakWidth out;
    out.left_hz = left;
    out.right_hz = right;
    out.center_hz = 0.5 * (left + right);
    out.fwhm_hz = right - left;
    out.peak_height = height;
    out.peak_index = k;
    return out;
}

}  // namespace cloaksim
