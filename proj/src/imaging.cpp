#include "cloaksim/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cloaksim/errors.hpp"
#include "cloaksim/random.hpp"

namespace cloaksim {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Fraction of a unit 1D Gaussian between a and b.
double gaussian_mass(double a, double b, double center, double sigma) {
    const double k = 1.0 / (std::numbers::sqrt2 * sigma);
    return 0.5 * (std::erf((b - center) * k) - std::erf((a - center) * k));
}

std::vector<double> pixel_masses(std::size_t n, double origin, double pitch, double center, double sigma) {
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = origin + static_cast<double>(i) * pitch;
        m[i] = gaussian_mass(a, a + pitch, center, sigma);
    }
    return m;
}

std::vector<double> render(const RasterImage& frame, double x, double y, double sigma, double signal,
                           double background) {
    const auto mx = pixel_masses(frame.nx, frame.origin_x_nm, frame.pitch_nm, x, sigma);
    const auto my = pixel_masses(frame.ny, frame.origin_y_nm, frame.pitch_nm, y, sigma);
    std::vector<double> v(frame.nx * frame.ny);
    for (std::size_t iy = 0; iy < frame.ny; ++iy) {
        for (std::size_t ix = 0; ix < frame.nx; ++ix) v[iy * frame.nx + ix] = signal * mx[ix] * my[iy] + background;
    }
    return v;
}

double border_median(const RasterImage& image) {
    std::vector<double> b;
    for (std::size_t ix = 0; ix < image.nx; ++ix) {
        b.push_back(image.at(ix, 0));
        b.push_back(image.at(ix, image.ny - 1));
    }
    for (std::size_t iy = 1; iy + 1 < image.ny; ++iy) {
        b.push_back(image.at(0, iy));
        b.push_back(image.at(image.nx - 1, iy));
    }
    std::nth_element(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(b.size() / 2), b.end());
    return b[b.size() / 2];
}

}  // namespace

double RasterImage::sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

void RasterImage::validate() const {
    if (nx == 0 || ny == 0) throw DomainError("image must have at least one pixel");
    if (!(pitch_nm > 0.0) || !std::isfinite(pitch_nm)) throw DomainError("pixel pitch must be positive");
    if (values.size() != nx * ny) throw DomainError("image data size does not match nx * ny");
    for (double v : values) {
        if (!std::isfinite(v)) throw DomainError("image contains non-finite values");
    }
}

double psf_sigma_nm(double fwhm_nm) {
    if (!(fwhm_nm > 0.0)) throw DomainError("PSF FWHM must be positive");
    return fwhm_nm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

PsfSimulation centered_frame(double center_x_nm, double center_y_nm, double pitch_nm, std::size_t nx,
                             std::size_t ny) {
    PsfSimulation s;
    s.center_x_nm = center_x_nm;
    s.center_y_nm = center_y_nm;
    s.pitch_nm = pitch_nm;
    s.nx = nx;
    s.ny = ny;
    s.origin_x_nm = center_x_nm - 0.5 * pitch_nm * static_cast<double>(nx);
    s.origin_y_nm = center_y_nm - 0.5 * pitch_nm * static_cast<double>(ny);
    return s;
}

RasterImage simulate_psf_image(const PsfSimulation& sim, const FocusParams& focus, std::uint64_t seed) {
    focus.validate();
    if (sim.nx < 5 || sim.ny < 5) throw SamplingError("PSF image needs at least 5 x 5 pixels");
    if (!(sim.pitch_nm > 0.0)) throw DomainError("pixel pitch must be positive");
    if (focus.focal_fwhm_nm < 2.0 * sim.pitch_nm) throw SamplingError("PSF FWHM spans fewer than two pixels");
    if (!(sim.total_counts >= 0.0) || !(sim.background_per_pixel >= 0.0)) {
        throw DomainError("counts and background must be non-negative");
    }
    RasterImage img;
    img.nx = sim.nx;
    img.ny = sim.ny;
    img.pitch_nm = sim.pitch_nm;
    img.origin_x_nm = sim.origin_x_nm;
    img.origin_y_nm = sim.origin_y_nm;
    img.values = render(img, sim.center_x_nm + sim.bias_x_nm, sim.center_y_nm + sim.bias_y_nm,
                        psf_sigma_nm(focus.focal_fwhm_nm), sim.total_counts, sim.background_per_pixel);
    if (!sim.noiseless) {
        Rng rng = make_rng(seed, "psf");
        for (double& v : img.values) v = draw_counts(rng, v);
    }
    return img;
}

FitProblem make_psf_problem(const RasterImage& image, std::span<const double> initial) {
    image.validate();
    if (initial.size() != 5) throw DomainError("PSF model has five parameters");
    FitProblem p;
    p.names = {"x_nm", "y_nm", "sigma_nm", "signal", "background"};
    p.initial.assign(initial.begin(), initial.end());
    p.transforms = {ParamTransform::identity, ParamTransform::identity, ParamTransform::log,
                    ParamTransform::log, ParamTransform::identity};
    const double bscale = std::max(1.0, std::abs(initial[4]));
    p.scales = {image.pitch_nm, image.pitch_nm, 1.0, 1.0, bscale};
    p.lower = {-inf, -inf, -inf, -inf, -inf};
    p.upper = {inf, inf, inf, inf, inf};
    RasterImage frame = image;
    p.residuals = [frame](std::span<const double> q) {
        std::vector<double> r = render(frame, q[0], q[1], q[2], q[3], q[4]);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= frame.values[i];
        return r;
    };
    return p;
}

Localization localize_psf(const RasterImage& image, const LocalizationOptions& options) {
    image.validate();
    if (image.nx < 5 || image.ny < 5) throw SamplingError("PSF image needs at least 5 x 5 pixels");

    const double bg = std::max(0.0, border_median(image));
    const auto peak_it = std::max_element(image.values.begin(), image.values.end());
    const double peak = *peak_it;
    if (!(peak > bg + options.detection_sigmas * std::sqrt(std::max(bg, 1.0)))) {
        throw DetectionError("no PSF above background");
    }

    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t iy = 0; iy < image.ny; ++iy) {
        for (std::size_t ix = 0; ix < image.nx; ++ix) {
            const double w = std::max(0.0, image.at(ix, iy) - bg);
            sw += w;
            sx += w * image.pixel_center_x(ix);
            sy += w * image.pixel_center_y(iy);
        }
    }
    const double cx = sx / sw, cy = sy / sw;
    double sxx = 0.0;
    for (std::size_t iy = 0; iy < image.ny; ++iy) {
        for (std::size_t ix = 0; ix < image.nx; ++ix) {
            const double w = std::max(0.0, image.at(ix, iy) - bg);
            const double dx = image.pixel_center_x(ix) - cx, dy = image.pixel_center_y(iy) - cy;
            sxx += w * (dx * dx + dy * dy);
        }
    }
    const double extent = image.pitch_nm * static_cast<double>(std::min(image.nx, image.ny));
    const double sigma0 = std::clamp(std::sqrt(0.5 * sxx / sw), 0.5 * image.pitch_nm, 0.5 * extent);
    const double signal0 = std::max(sw, 1.0);
    const std::vector<double> start{cx, cy, sigma0, signal0, bg};

    // Data-weighted pass, then a refit weighted by the model variance.
    FitProblem p = make_psf_problem(image, start);
    std::vector<double> weights(image.values.size());
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = 1.0 / std::max(image.values[i], 1.0);
    p.weights = weights;
    FitResult fit = lm_minimize(p, options.lm);
    if (fit.parameters[3] > 0.0) {
        const std::vector<double>& q = fit.parameters;
        const std::vector<double> model = render(image, q[0], q[1], q[2], q[3], q[4]);
        for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = 1.0 / std::max(model[i], 0.1);
        p.initial = fit.parameters;
        p.weights = weights;
        // Poisson variances are known, so the covariance is not rescaled by chi^2.
        LmOptions lm = options.lm;
        lm.scale_covariance = false;
        fit = lm_minimize(p, lm);
    }

    Localization out;
    out.x_nm = fit.parameters[0];
    out.y_nm = fit.parameters[1];
    out.sigma_nm = fit.parameters[2];
    out.signal_counts = fit.parameters[3];
    out.background = fit.parameters[4];
    out.precision_x_nm = fit.standard_errors[0];
    out.precision_y_nm = fit.standard_errors[1];
    out.fit = std::move(fit);
    return out;
}

double localization_precision(double sigma_nm, double photons) {
    if (!(sigma_nm > 0.0) || !(photons > 0.0)) throw DomainError("sigma and photon count must be positive");
    return sigma_nm / std::sqrt(photons);
}

double photons_for_precision(double sigma_nm, double precision_nm) {
    if (!(sigma_nm > 0.0) || !(precision_nm > 0.0)) throw DomainError("sigma and precision must be positive");
    const double r = sigma_nm / precision_nm;
    return r * r;
}

}  // namespace cloaksim
