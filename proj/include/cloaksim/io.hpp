#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cloaksim/imaging.hpp"
#include "cloaksim/lm.hpp"
#include "cloaksim/scan_pipeline.hpp"
#include "cloaksim/spectrum.hpp"

namespace cloaksim::io {

namespace fs = std::filesystem;

// Shortest round-trip decimal representation; locale independent.
std::string format_double(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const fs::path& path, const CsvTable& table);
CsvTable read_csv(const fs::path& path);

// Columns: frequency_hz, <value_column>.
void write_spectrum_csv(const fs::path& path, const Spectrum& spectrum,
                        std::string_view value_column = "transmission");
Spectrum read_spectrum_csv(const fs::path& path, SpectrumKind kind = SpectrumKind::transmission);

// Columns: scan_index, bin_index, frequency_hz, counts. The JSON sidecar
// echoes seed and configuration.
void write_scanset(const fs::path& csv_path, const fs::path& metadata_path, const ScanSet& set);
ScanSet read_scanset_csv(const fs::path& csv_path);

enum class ImageEncoding { csv, binary };

// Header (JSON): nx, ny, pitch_nm, origin_x_nm, origin_y_nm, encoding, data file.
// Binary data is little-endian float64, row-major.
void write_image(const fs::path& header_path, const RasterImage& image, ImageEncoding encoding);
RasterImage read_image(const fs::path& header_path);

// key = value lines, one section per fit.
std::string format_fit_report(const FitResult& fit, std::string_view title);

void write_text(const fs::path& path, std::string_view text);

}  // namespace cloaksim::io
