#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cloaksim/fit_models.hpp"
#include "cloaksim/fit_zstack.hpp"
#include "cloaksim/imaging.hpp"
#include "cloaksim/lineshape_model.hpp"
#include "cloaksim/lm.hpp"
#include "cloaksim/scan_pipeline.hpp"
#include "cloaksim/tls_dynamics.hpp"
#include "cloaksim/transparency.hpp"

namespace cloaksim {

struct AntennaConfig {
    double resonance_thz = 404.96;
    double fwhm_thz = 40.0;
    double drive_amplitude = 1.0;
    double drive_phase_rad = 0.0;
    double scatter_coupling = 1.0;
    double zeta = 0.292893218813452;  // 50% on-focus dip
};

struct EmitterConfig {
    double resonance_thz = 404.96;
    double lifetime_ns = 1.4;
    double nonradiative_fraction = 0.0;
    double pure_dephasing_mhz = 87.0;
    double branching_ratio = 0.44;
    std::optional<double> fwhm_mhz;  // oscillator width; default (Gamma_1 + 2 Gamma*) / 2pi
    double drive_amplitude = 0.0;
    double drive_phase_rad = 0.0;
    double scatter_coupling = 0.0;
};

struct HybridConfig {
    std::optional<double> induced_width_mhz = 94.4;
    std::optional<double> coupling_rad2_per_s2;
    double phase_offset_rad = 0.0;
    bool design_from_observables = false;
    TransparencyObservables observables;
};

struct SpectrumConfig {
    std::string model = "composite";  // composite | single
    std::string scatterer = "antenna";  // single model only: antenna | emitter
    std::optional<double> zeta;         // single model; default antenna.zeta
    std::optional<double> center_thz;
    double span_mhz = 3000.0;
    std::size_t points = 1201;
    double z_nm = 0.0;
};

struct ZStackConfig {
    std::size_t positions = 15;
    double total_distance_nm = 3500.0;
    double center_nm = 0.0;
    double window_mhz = 1500.0;  // asymmetry window around the molecular line
    double noise_counts = 0.0;   // detected counts per point at T = 1; 0: noiseless
};

struct DriveConfig {
    double rabi_mhz = 100.0;  // Omega / 2pi
    double detuning_mhz = 0.0;
    double rabi_per_sqrt_nw_mhz = 50.0;
};

struct G2Config {
    double tau_max_ns = 20.0;
    std::size_t points = 201;
    std::vector<double> rabi_mhz{100.0, 300.0};  // traces synthesized for fit-g2
    std::vector<double> detuning_mhz;            // per trace; empty: drive.detuning_mhz for all
    double signal_fraction = 1.0;
    double noise_sigma = 0.0;
};

struct SaturationConfig {
    std::vector<double> powers_nw{0.5, 1, 2, 5, 10, 20, 50, 100, 200, 500};
    double detection_scale = 1.0e-3;
    bool zpl_blocked = true;
    double integration_s = 0.0;  // Poisson noise on the counts; 0: noiseless
};

struct ScanRunConfig {
    ScanConfig scan;
    JitterModel jitter{JitterKind::gaussian_per_scan, 290e6};
    double fwhm_mhz = 290.0;
    double threshold_sigmas = 3.0;
    std::size_t min_accepted = 10;
};

struct FitConfig {
    LmOptions lm;
    Weighting weighting = Weighting::uniform;
    ZStackFitSettings zstack;  // flags and axial model; the initial model comes from the hybrid section
    bool auto_initialize = true;
    bool g2_fit_rabi_scale = false;  // shared calibration factor on the configured drives
};

struct PsfConfig {
    PsfSimulation sim;
    bool centered = true;  // frame centered on the emitter; otherwise origin_* are used
    std::string encoding = "csv";
    double detection_sigmas = 5.0;
};

struct InputsConfig {
    std::optional<std::filesystem::path> spectrum_csv;
    std::vector<std::filesystem::path> zstack_csv;
    std::vector<std::filesystem::path> g2_csv;
    std::vector<double> g2_rabi_mhz;
    std::vector<double> g2_detuning_mhz;
    std::optional<std::filesystem::path> scans_csv;
    std::optional<std::filesystem::path> saturation_csv;
    std::optional<std::filesystem::path> image_header;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    FocusParams focus;
    double refractive_index = 1.5;
    AntennaConfig antenna;
    EmitterConfig emitter;
    HybridConfig hybrid;
    SpectrumConfig spectrum;
    ZStackConfig zstack;
    DriveConfig drive;
    G2Config g2;
    SaturationConfig saturation;
    ScanRunConfig scans;
    FitConfig fit;
    PsfConfig psf;
    InputsConfig inputs;

    EmitterParams emitter_params() const;
    HybridModel hybrid_model() const;
    OscillatorParams antenna_oscillator() const;
    std::vector<double> spectrum_grid_hz() const;
};

// Throws ConfigError on malformed JSON, unknown keys, wrong types or values
// that violate module invariants. Relative input paths are resolved against
// `base_dir`.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical JSON of the fully resolved configuration (defaults filled in).
std::string config_to_json(const ExperimentConfig& config);

}  // namespace cloaksim
