#pragma once

#include <numbers>

namespace cloaksim {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double speed_of_light = 299'792'458.0;  // m/s

inline constexpr double to_angular(double hz) { return two_pi * hz; }
inline constexpr double to_hz(double angular) { return angular / two_pi; }

inline constexpr double mhz = 1e6;
inline constexpr double ghz = 1e9;
inline constexpr double thz = 1e12;
inline constexpr double ns = 1e-9;

// Vacuum wavelength (nm) <-> ordinary frequency (Hz).
inline constexpr double frequency_from_wavelength_nm(double wavelength_nm) {
    return speed_of_light / (wavelength_nm * 1e-9);
}
inline constexpr double wavelength_nm_from_frequency(double hz) {
    return speed_of_light / hz * 1e9;
}

}  // namespace cloaksim
