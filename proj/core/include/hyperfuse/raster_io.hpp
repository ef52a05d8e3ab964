#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperfuse/types.hpp"

/// File formats at the tool boundary.
///
/// Rasters are ENVI-style: a raw little-endian float32 band-sequential data
/// file plus a text header next to it with the same stem and a `.hdr`
/// extension. Label maps and spectral tables are CSV; reports are JSON.
/// Every writer goes through a temp file and a rename, so a reader never
/// observes a half-written artifact.
namespace hyperfuse::io {

namespace fs = std::filesystem;

/// Header path belonging to a raster data path (`x.bsq` -> `x.hdr`).
fs::path header_path(const fs::path& data_path);

SpectralCube read_cube(const fs::path& data_path);
void write_cube(const SpectralCube& cube, const fs::path& data_path);

PanImage read_pan(const fs::path& data_path);
void write_pan(const PanImage& pan, const fs::path& data_path);

LabelMap read_labels(const fs::path& path);
void write_labels(const LabelMap& labels, const fs::path& path);

/// `wavelength_nm,<name1>,<name2>,...` with one row per wavelength sample.
/// Shared by spectral libraries and estimated endmember signatures; only
/// the library reader applies the reflectance range check.
struct SpectralTable {
  std::vector<std::string> names;
  std::vector<double> wavelengths_nm;
  std::vector<std::vector<double>> columns;  // columns[i][row]
};

SpectralTable read_spectral_table(const fs::path& path);
void write_spectral_table(const SpectralTable& table, const fs::path& path);

SpectralLibrary read_library(const fs::path& path);
void write_library(const SpectralLibrary& library, const fs::path& path);

QualityReport read_report(const fs::path& path);
void write_report(const QualityReport& report, const fs::path& path);
nlohmann::ordered_json report_to_json(const QualityReport& report);
QualityReport report_from_json(const nlohmann::ordered_json& json);

nlohmann::ordered_json read_json(const fs::path& path);
void write_json(const nlohmann::ordered_json& json, const fs::path& path);

/// Writes `contents` to `path` through `path.tmp` + rename.
void write_file_atomic(const fs::path& path, std::string_view contents);
std::string read_file(const fs::path& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace hyperfuse::io
