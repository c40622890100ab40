#include "cloaksim/beam_optics.hpp"

#include <cmath>
#include <string>

#include "cloaksim/errors.hpp"
#include "cloaksim/units.hpp"

namespace cloaksim {

namespace {

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

}  // namespace

void FocusParams::validate() const {
    require_positive(wavelength_nm, "wavelength_nm");
    require_positive(focal_fwhm_nm, "focal_fwhm_nm");
    require_positive(rayleigh_range_nm, "rayleigh_range_nm");
    if (!std::isfinite(z_nm)) throw DomainError("z_nm must be finite");
}

double beam_waist_from_fwhm(double focal_fwhm_nm) {
    require_positive(focal_fwhm_nm, "focal_fwhm_nm");
    return focal_fwhm_nm / std::sqrt(2.0 * std::log(2.0));
}

double rayleigh_range_from_fwhm(double focal_fwhm_nm, double wavelength_nm,
                                double refractive_index) {
    require_positive(wavelength_nm, "wavelength_nm");
    require_positive(refractive_index, "refractive_index");
    const double w0 = beam_waist_from_fwhm(focal_fwhm_nm);
    return pi * w0 * w0 * refractive_index / wavelength_nm;
}

FocusParams make_focus(double wavelength_nm, double focal_fwhm_nm, double refractive_index,
                       double rayleigh_range_nm) {
    FocusParams focus;
    focus.wavelength_nm = wavelength_nm;
    focus.focal_fwhm_nm = focal_fwhm_nm;
    focus.rayleigh_range_nm = rayleigh_range_nm > 0.0
                                  ? rayleigh_range_nm
                                  : rayleigh_range_from_fwhm(focal_fwhm_nm, wavelength_nm,
                                                             refractive_index);
    focus.validate();
    return focus;
}

double gouy_phase(double z_nm, double rayleigh_range_nm) {
    require_positive(rayleigh_range_nm, "rayleigh range");
    return std::atan(z_nm / rayleigh_range_nm);
}

double axial_envelope(double z_nm, double rayleigh_range_nm) {
    require_positive(rayleigh_range_nm, "rayleigh range");
    const double r = z_nm / rayleigh_range_nm;
    return 1.0 / std::sqrt(1.0 + r * r);
}

double sigma0(double wavelength_nm) {
    require_positive(wavelength_nm, "wavelength_nm");
    return 3.0 * wavelength_nm * wavelength_nm / two_pi;
}

double zeta_from_dip(double dip) {
    if (!(dip >= 0.0 && dip < 1.0)) throw DomainError("dip must lie in [0, 1)");
    // 1 - sqrt(1 - d) written without cancellation for small d.
    return dip / (1.0 + std::sqrt(1.0 - dip));
}

double dip_from_zeta(double zeta) {
    if (!(zeta >= 0.0 && zeta < 1.0)) throw DomainError("zeta must lie in [0, 1)");
    return zeta * (2.0 - zeta);
}

}  // namespace cloaksim
