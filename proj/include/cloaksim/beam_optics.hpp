#pragma once

namespace cloaksim {

// Geometry of the focused excitation beam. Lengths in nm.
struct FocusParams {
    double wavelength_nm = 740.0;
    double focal_fwhm_nm = 270.0;   // intensity FWHM of the focal spot
    double rayleigh_range_nm = 0.0; // 0 until set; see make_focus()
    double z_nm = 0.0;              // axial position, 0 = focal plane

    void validate() const;
};

// Gaussian waist w0 (1/e^2 intensity radius) for a given intensity FWHM.
double beam_waist_from_fwhm(double focal_fwhm_nm);

// z_R = pi w0^2 n / lambda, i.e. the Rayleigh range in a medium of index n.
double rayleigh_range_from_fwhm(double focal_fwhm_nm, double wavelength_nm,
                                double refractive_index = 1.5);

// Focus with the Rayleigh range derived from the spot size unless one is given.
FocusParams make_focus(double wavelength_nm, double focal_fwhm_nm,
                       double refractive_index = 1.5, double rayleigh_range_nm = 0.0);

double gouy_phase(double z_nm, double rayleigh_range_nm);

// On-axis field amplitude relative to the focal plane, 1/sqrt(1+(z/z_R)^2).
double axial_envelope(double z_nm, double rayleigh_range_nm);

// Resonant cross section 3 lambda^2 / (2 pi) of an ideal two-level scatterer, nm^2.
double sigma0(double wavelength_nm);

// Extinction coupling for an on-focus resonant transmission dip: the inverse
// of dip = 1 - (1 - zeta)^2.
double zeta_from_dip(double dip);
double dip_from_zeta(double zeta);

}  // namespace cloaksim
