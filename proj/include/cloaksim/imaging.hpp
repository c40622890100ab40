#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cloaksim/beam_optics.hpp"
#include "cloaksim/lm.hpp"

namespace cloaksim {

// Row-major raster. Pixel (ix, iy) covers
// [origin_x + ix pitch, origin_x + (ix + 1) pitch) x [origin_y + iy pitch, ...).
struct RasterImage {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double pitch_nm = 1.0;
    double origin_x_nm = 0.0;
    double origin_y_nm = 0.0;
    std::vector<double> values;

    double& at(std::size_t ix, std::size_t iy) { return values[iy * nx + ix]; }
    double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
    double pixel_center_x(std::size_t ix) const { return origin_x_nm + (static_cast<double>(ix) + 0.5) * pitch_nm; }
    double pixel_center_y(std::size_t iy) const { return origin_y_nm + (static_cast<double>(iy) + 0.5) * pitch_nm; }
    double sum() const;
    void validate() const;
};

// Gaussian sigma of an intensity profile with the given FWHM.
double psf_sigma_nm(double fwhm_nm);

struct PsfSimulation {
    double center_x_nm = 0.0;
    double center_y_nm = 0.0;
    double total_counts = 1000.0;  // expected counts over the whole plane
    double background_per_pixel = 0.0;
    double pitch_nm = 50.0;
    std::size_t nx = 21;
    std::size_t ny = 21;
    double origin_x_nm = 0.0;
    double origin_y_nm = 0.0;
    // Systematic displacement of the apparent emitter, e.g. emission redirected
    // by a nearby antenna. Added to the true center before imaging.
    double bias_x_nm = 0.0;
    double bias_y_nm = 0.0;
    bool noiseless = false;
};

// Frame of nx x ny pixels centered on (cx, cy).
PsfSimulation centered_frame(double center_x_nm, double center_y_nm, double pitch_nm,
                             std::size_t nx, std::size_t ny);

// Pixel-integrated 2D Gaussian of intensity FWHM focus.focal_fwhm_nm with shot
// noise. Throws SamplingError below 5x5 pixels or with FWHM under two pixels.
RasterImage simulate_psf_image(const PsfSimulation& sim, const FocusParams& focus,
                               std::uint64_t seed);

struct Localization {
    double x_nm = 0.0;
    double y_nm = 0.0;
    double precision_x_nm = 0.0;
    double precision_y_nm = 0.0;
    double sigma_nm = 0.0;
    double signal_counts = 0.0;
    double background = 0.0;
    FitResult fit;

    double precision_nm() const { return 0.5 * (precision_x_nm + precision_y_nm); }
};

struct LocalizationOptions {
    double detection_sigmas = 5.0;  // peak must exceed background + k sqrt(background)
    LmOptions lm;
};

// Parameters: x_nm, y_nm, sigma_nm (log), signal (log), background.
FitProblem make_psf_problem(const RasterImage& image, std::span<const double> initial);

// 2D Gaussian fit with free width and background; precision from the
// covariance diagonal. Throws DetectionError on images without a peak.
Localization localize_psf(const RasterImage& image, const LocalizationOptions& options = {});

// sigma / sqrt(N).
double localization_precision(double sigma_nm, double photons);

// Photons needed for a given precision: (sigma / precision)^2.
double photons_for_precision(double sigma_nm, double precision_nm);

}  // namespace cloaksim
