#include "cloaksim/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "cloaksim/errors.hpp"

namespace cloaksim::io {

namespace {

using nlohmann::json;

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw IoError(path.string() + ":" + std::to_string(line) + ": not a number: '" + s + "'");
    }
    return v;
}

std::size_t column(const CsvTable& t, std::string_view name, const fs::path& path) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == name) return i;
    }
    throw IoError(path.string() + ": missing column '" + std::string(name) + "'");
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw IoError("number formatting failed");
    return std::string(buf.data(), ptr);
}

void write_csv(const fs::path& path, const CsvTable& table) {
    std::ofstream out = open_out(path);
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw IoError("CSV row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in = open_in(path);
    CsvTable t;
    std::string line;
    std::size_t n = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++n;
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        if (!have_header) {
            t.header = split(s);
            have_header = true;
            continue;
        }
        const std::vector<std::string> cells = split(s);
        if (cells.size() != t.header.size()) {
            throw IoError(path.string() + ":" + std::to_string(n) + ": expected " +
                          std::to_string(t.header.size()) + " columns");
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const std::string& c : cells) row.push_back(parse_double(c, path, n));
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw IoError(path.string() + ": empty CSV file");
    return t;
}

void write_spectrum_csv(const fs::path& path, const Spectrum& spectrum, std::string_view value_column) {
    spectrum.validate();
    CsvTable t;
    t.header = {"frequency_hz", std::string(value_column)};
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        t.rows.push_back({spectrum.frequency_hz[i], spectrum.values[i]});
    }
    write_csv(path, t);
}

Spectrum read_spectrum_csv(const fs::path& path, SpectrumKind kind) {
    const CsvTable t = read_csv(path);
    if (t.header.size() < 2) throw IoError(path.string() + ": spectrum needs two columns");
    const std::size_t fc = column(t, "frequency_hz", path);
    const std::size_t vc = fc == 0 ? 1 : 0;
    Spectrum s;
    s.kind = kind;
    for (const auto& row : t.rows) {
        s.frequency_hz.push_back(row[fc]);
        s.values.push_back(row[vc]);
    }
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return s;
}

void write_scanset(const fs::path& csv_path, const fs::path& metadata_path, const ScanSet& set) {
    CsvTable t;
    t.header = {"scan_index", "bin_index", "frequency_hz", "counts"};
    for (std::size_t k = 0; k < set.scans.size(); ++k) {
        const Scan& s = set.scans[k];
        for (std::size_t i = 0; i < s.counts.size(); ++i) {
            t.rows.push_back({static_cast<double>(k), static_cast<double>(i), s.frequency_hz[i], s.counts[i]});
        }
    }
    write_csv(csv_path, t);

    const ScanConfig& c = set.config;
    json meta = {
        {"seed", set.seed},
        {"n_scans", set.scans.size()},
        {"config",
         {{"scan_rate_hz_per_s", c.scan_rate_hz_per_s},
          {"span_hz", c.span_hz},
          {"n_bins", c.n_bins},
          {"mean_peak_counts", c.mean_peak_counts},
          {"baseline_counts", c.baseline_counts},
          {"noiseless", c.noiseless},
          {"bin_oversampling", c.bin_oversampling}}},
        {"jitter",
         {{"kind", set.jitter.kind == JitterKind::gaussian_per_scan ? "gaussian_per_scan" : "random_walk"},
          {"sigma_hz", set.jitter.sigma_hz}}},
        {"true_centers_hz", set.true_centers_hz},
    };
    write_text(metadata_path, meta.dump(2) + "\n");
}

ScanSet read_scanset_csv(const fs::path& csv_path) {
    const CsvTable t = read_csv(csv_path);
    const std::size_t ks = column(t, "scan_index", csv_path);
    const std::size_t fc = column(t, "frequency_hz", csv_path);
    const std::size_t cc = column(t, "counts", csv_path);
    std::map<long long, Scan> by_index;
    for (const auto& row : t.rows) {
        if (row[ks] < 0.0 || row[ks] != std::floor(row[ks])) throw IoError(csv_path.string() + ": bad scan_index");
        Scan& s = by_index[static_cast<long long>(row[ks])];
        s.frequency_hz.push_back(row[fc]);
        s.counts.push_back(row[cc]);
    }
    ScanSet set;
    for (auto& [k, s] : by_index) set.scans.push_back(std::move(s));
    if (set.scans.empty()) throw IoError(csv_path.string() + ": no scans");
    set.config.n_scans = set.scans.size();
    set.config.n_bins = set.scans.front().counts.size();
    const auto& f = set.scans.front().frequency_hz;
    if (f.size() >= 2) set.config.span_hz = (f.back() - f.front()) * static_cast<double>(f.size()) /
                                            static_cast<double>(f.size() - 1);
    return set;
}

void write_image(const fs::path& header_path, const RasterImage& image, ImageEncoding encoding) {
    image.validate();
    fs::path data_path = header_path;
    data_path.replace_extension(encoding == ImageEncoding::csv ? ".csv" : ".bin");
    json header = {
        {"nx", image.nx},
        {"ny", image.ny},
        {"pitch_nm", image.pitch_nm},
        {"origin_x_nm", image.origin_x_nm},
        {"origin_y_nm", image.origin_y_nm},
        {"encoding", encoding == ImageEncoding::csv ? "csv" : "binary"},
        {"data", data_path.filename().string()},
    };
    if (encoding == ImageEncoding::csv) {
        CsvTable t;
        t.header = {"ix", "iy", "x_nm", "y_nm", "counts"};
        for (std::size_t iy = 0; iy < image.ny; ++iy) {
            for (std::size_t ix = 0; ix < image.nx; ++ix) {
                t.rows.push_back({static_cast<double>(ix), static_cast<double>(iy), image.pixel_center_x(ix),
                                  image.pixel_center_y(iy), image.at(ix, iy)});
            }
        }
        write_csv(data_path, t);
    } else {
        std::ofstream out = open_out(data_path, std::ios::out | std::ios::binary);
        for (double v : image.values) {
            std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
            std::array<char, 8> bytes{};
            for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffU);
            out.write(bytes.data(), 8);
        }
        if (!out) throw IoError("write failed: " + data_path.string());
    }
    write_text(header_path, header.dump(2) + "\n");
}

RasterImage read_image(const fs::path& header_path) {
    std::ifstream in = open_in(header_path);
    json header;
    try {
        header = json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(header_path.string() + ": " + e.what());
    }
    RasterImage img;
    fs::path data_path;
    std::string encoding;
    try {
        img.nx = header.at("nx").get<std::size_t>();
        img.ny = header.at("ny").get<std::size_t>();
        img.pitch_nm = header.at("pitch_nm").get<double>();
        img.origin_x_nm = header.at("origin_x_nm").get<double>();
        img.origin_y_nm = header.at("origin_y_nm").get<double>();
        encoding = header.at("encoding").get<std::string>();
        data_path = header_path.parent_path() / header.at("data").get<std::string>();
    } catch (const json::exception& e) {
        throw IoError(header_path.string() + ": " + e.what());
    }
    img.values.assign(img.nx * img.ny, 0.0);
    if (encoding == "csv") {
        const CsvTable t = read_csv(data_path);
        const std::size_t xc = column(t, "ix", data_path);
        const std::size_t yc = column(t, "iy", data_path);
        const std::size_t vc = column(t, "counts", data_path);
        if (t.rows.size() != img.values.size()) throw IoError(data_path.string() + ": wrong pixel count");
        for (const auto& row : t.rows) {
            const auto ix = static_cast<std::size_t>(row[xc]);
            const auto iy = static_cast<std::size_t>(row[yc]);
            if (ix >= img.nx || iy >= img.ny) throw IoError(data_path.string() + ": pixel index out of range");
            img.at(ix, iy) = row[vc];
        }
    } else if (encoding == "binary") {
        std::ifstream data = open_in(data_path, std::ios::in | std::ios::binary);
        for (double& v : img.values) {
            std::array<unsigned char, 8> bytes{};
            if (!data.read(reinterpret_cast<char*>(bytes.data()), 8)) {
                throw IoError(data_path.string() + ": truncated image data");
            }
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
            v = std::bit_cast<double>(bits);
        }
    } else {
        throw IoError(header_path.string() + ": unknown encoding '" + encoding + "'");
    }
    try {
        img.validate();
    } catch (const DomainError& e) {
        throw IoError(header_path.string() + ": " + e.what());
    }
    return img;
}

std::string format_fit_report(const FitResult& fit, std::string_view title) {
    std::ostringstream out;
    out << "[" << title << "]\n";
    out << "converged = " << (fit.converged ? "true" : "false") << '\n';
    out << "termination = " << fit.termination << '\n';
    out << "iterations = " << fit.iterations << '\n';
    out << "evaluations = " << fit.evaluations << '\n';
    out << "rss = " << format_double(fit.rss) << '\n';
    out << "reduced_chi_square = " << format_double(fit.reduced_chi_square()) << '\n';
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        out << fit.names[i] << " = " << format_double(fit.parameters[i]);
        if (i < fit.standard_errors.size()) out << " +- " << format_double(fit.standard_errors[i]);
        out << '\n';
    }
    for (const std::string& w : fit.warnings) out << "warning = " << w << '\n';
    return out.str();
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out = open_out(path);
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace cloaksim::io
