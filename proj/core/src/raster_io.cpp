#include "hyperfuse/raster_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "hyperfuse/error.hpp"

namespace hyperfuse::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> text_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::optional<double> parse_double(std::string_view text) {
  const auto s = trim(text);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<long long> parse_integer(std::string_view text) {
  const auto s = trim(text);
  if (s.empty()) return std::nullopt;
  long long value = 0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// ---------------------------------------------------------------------------
// ENVI header

using Header = std::map<std::string, std::string>;

Header parse_header(const std::string& text, const fs::path& path) {
  Header header;
  auto lines = text_lines(text);
  std::size_t i = 0;
  if (!lines.empty() && trim(lines[0]) == "ENVI") i = 1;
  for (; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(i + 1) +
                        ": expected 'key = value', got '" + line + "'");
    }
    auto key = lower(trim(std::string_view(line).substr(0, eq)));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (!value.empty() && value.front() == '{') {
      while (value.find('}') == std::string::npos) {
        if (++i >= lines.size()) {
          throw FormatError(path.string() + ": unterminated '{' for key '" + key + "'");
        }
        value += " " + trim(lines[i]);
      }
    }
    if (key.empty()) throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": empty key");
    header[key] = value;
  }
  return header;
}

const std::string& header_value(const Header& h, const std::string& key, const fs::path& path) {
  const auto it = h.find(key);
  if (it == h.end()) throw FormatError(path.string() + ": missing header key '" + key + "'");
  return it->second;
}

std::size_t header_count(const Header& h, const std::string& key, const fs::path& path) {
  const auto v = parse_integer(header_value(h, key, path));
  if (!v || *v < 1) {
    throw FormatError(path.string() + ": header key '" + key + "' must be a positive integer");
  }
  return static_cast<std::size_t>(*v);
}

std::vector<double> parse_brace_list(const std::string& value, const std::string& key,
                                     const fs::path& path) {
  const auto open = value.find('{');
  const auto close = value.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw FormatError(path.string() + ": header key '" + key + "' must be a '{ ... }' list");
  }
  std::vector<double> out;
  const auto body = trim(std::string_view(value).substr(open + 1, close - open - 1));
  if (body.empty()) return out;
  for (const auto& item : split(body, ',')) {
    const auto v = parse_double(item);
    if (!v) {
      throw FormatError(path.string() + ": non-numeric entry '" + trim(item) + "' in '" + key +
                        "'");
    }
    out.push_back(*v);
  }
  return out;
}

struct RasterHeader {
  std::size_t samples = 0;
  std::size_t lines = 0;
  std::size_t bands = 0;
  std::vector<double> wavelengths_nm;
};

RasterHeader read_header(const fs::path& data_path, bool require_wavelengths) {
  const auto hdr = header_path(data_path);
  const auto h = parse_header(read_file(hdr), hdr);
  RasterHeader out;
  out.samples = header_count(h, "samples", hdr);
  out.lines = header_count(h, "lines", hdr);
  out.bands = header_count(h, "bands", hdr);
  if (trim(header_value(h, "data type", hdr)) != "4") {
    throw FormatError(hdr.string() + ": only 'data type = 4' (float32) is supported");
  }
  if (lower(trim(header_value(h, "interleave", hdr))) != "bsq") {
    throw FormatError(hdr.string() + ": only 'interleave = bsq' is supported");
  }
  if (trim(header_value(h, "byte order", hdr)) != "0") {
    throw FormatError(hdr.string() + ": only 'byte order = 0' (little-endian) is supported");
  }
  if (const auto it = h.find("header offset"); it != h.end() && trim(it->second) != "0") {
    throw FormatError(hdr.string() + ": nonzero 'header offset' is not supported");
  }
  if (const auto it = h.find("wavelength"); it != h.end()) {
    out.wavelengths_nm = parse_brace_list(it->second, "wavelength", hdr);
    if (out.wavelengths_nm.size() != out.bands) {
      throw FormatError(hdr.string() + ": header says bands = " + std::to_string(out.bands) +
                        " but wavelength list has " +
                        std::to_string(out.wavelengths_nm.size()) + " entries");
    }
  } else if (require_wavelengths) {
    throw FormatError(hdr.string() + ": missing header key 'wavelength'");
  }
  return out;
}

std::string render_header(std::size_t samples, std::size_t lines, std::size_t bands,
                          const std::vector<double>* wavelengths, std::string_view description) {
  std::ostringstream os;
  os << "ENVI\n";
  os << "description = {" << description << "}\n";
  os << "samples = " << samples << "\n";
  os << "lines = " << lines << "\n";
  os << "bands = " << bands << "\n";
  os << "header offset = 0\n";
  os << "file type = ENVI Standard\n";
  os << "data type = 4\n";
  os << "interleave = bsq\n";
  os << "byte order = 0\n";
  if (wavelengths != nullptr) {
    os << "wavelength units = Nanometers\n";
    os << "wavelength = {";
    for (std::size_t i = 0; i < wavelengths->size(); ++i) {
      os << (i == 0 ? " " : ", ") << format_double((*wavelengths)[i]);
    }
    os << " }\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// float32 payload

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

std::string encode_floats(std::span<const float> values) {
  std::string bytes(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto word = to_little_endian(std::bit_cast<std::uint32_t>(values[i]));
    std::memcpy(bytes.data() + 4 * i, &word, 4);
  }
  return bytes;
}

std::vector<float> read_floats(const fs::path& data_path, std::size_t count) {
  std::error_code ec;
  const auto size = fs::file_size(data_path, ec);
  if (ec) throw IoError("cannot open data file " + data_path.string());
  if (size != count * 4) {
    throw FormatError(data_path.string() + ": data file size mismatch, expected " +
                      std::to_string(count * 4) + " bytes from header, found " +
                      std::to_string(size));
  }
  const auto bytes = read_file(data_path);
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t word = 0;
    std::memcpy(&word, bytes.data() + 4 * i, 4);
    values[i] = std::bit_cast<float>(to_little_endian(word));
  }
  return values;
}

// Re-raise invariant failures found while reading as format errors tagged
// with the offending path.
template <typename T>
void validate_read(const T& value, const fs::path& path) {
  try {
    value.validate();
  } catch (const DomainError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------

fs::path header_path(const fs::path& data_path) {
  auto hdr = data_path;
  hdr.replace_extension(".hdr");
  if (hdr == data_path) hdr += ".hdr";
  return hdr;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return os.str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("error writing " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move temporary file into place for " + path.string());
  }
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw DomainError("cannot format number");
  return std::string(buf.data(), ptr);
}

SpectralCube read_cube(const fs::path& data_path) {
  const auto h = read_header(data_path, true);
  SpectralCube cube;
  cube.samples = h.samples;
  cube.lines = h.lines;
  cube.bands = h.bands;
  cube.wavelengths_nm = h.wavelengths_nm;
  cube.values = read_floats(data_path, h.samples * h.lines * h.bands);
  validate_read(cube, data_path);
  return cube;
}

void write_cube(const SpectralCube& cube, const fs::path& data_path) {
  cube.validate();
  write_file_atomic(data_path, encode_floats(cube.values));
  write_file_atomic(header_path(data_path),
                    render_header(cube.samples, cube.lines, cube.bands, &cube.wavelengths_nm,
                                  "hyperfuse spectral cube"));
}

PanImage read_pan(const fs::path& data_path) {
  const auto h = read_header(data_path, false);
  if (h.bands != 1) {
    throw FormatError(header_path(data_path).string() + ": PAN image must have bands = 1");
  }
  PanImage pan;
  pan.samples = h.samples;
  pan.lines = h.lines;
  pan.values = read_floats(data_path, h.samples * h.lines);
  validate_read(pan, data_path);
  return pan;
}

void write_pan(const PanImage& pan, const fs::path& data_path) {
  pan.validate();
  write_file_atomic(data_path, encode_floats(pan.values));
  write_file_atomic(header_path(data_path),
                    render_header(pan.samples, pan.lines, 1, nullptr, "hyperfuse panchromatic"));
}

LabelMap read_labels(const fs::path& path) {
  const auto lines = text_lines(read_file(path));
  if (lines.empty()) throw FormatError(path.string() + ": empty label file");
  LabelMap map;
  map.lines = lines.size();
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const auto cells = split(lines[row], ',');
    if (row == 0) {
      map.samples = cells.size();
    } else if (cells.size() != map.samples) {
      throw FormatError(path.string() + ":" + std::to_string(row + 1) + ": ragged row, expected " +
                        std::to_string(map.samples) + " cells, found " +
                        std::to_string(cells.size()));
    }
    for (const auto& cell : cells) {
      const auto v = parse_integer(cell);
      if (!v || *v > std::numeric_limits<int>::max() || *v < std::numeric_limits<int>::min()) {
        throw FormatError(path.string() + ":" + std::to_string(row + 1) +
                          ": non-integer label cell '" + trim(cell) + "'");
      }
      if (*v < 0) {
        throw DomainError(path.string() + ":" + std::to_string(row + 1) + ": negative label " +
                          std::to_string(*v));
      }
      map.labels.push_back(static_cast<int>(*v));
    }
  }
  return map;
}

void write_labels(const LabelMap& labels, const fs::path& path) {
  labels.validate();
  std::ostringstream os;
  for (std::size_t l = 0; l < labels.lines; ++l) {
    for (std::size_t s = 0; s < labels.samples; ++s) {
      if (s > 0) os << ',';
      os << labels.at(l, s);
    }
    os << '\n';
  }
  write_file_atomic(path, os.str());
}

SpectralTable read_spectral_table(const fs::path& path) {
  const auto lines = text_lines(read_file(path));
  if (lines.empty()) throw FormatError(path.string() + ": empty spectral table");
  const auto header = split(lines[0], ',');
  if (header.size() < 2 || lower(trim(header[0])) != "wavelength_nm") {
    throw FormatError(path.string() +
                      ":1: header must be 'wavelength_nm,<name1>,...' with at least one column");
  }
  SpectralTable table;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < header.size(); ++i) {
    auto name = trim(header[i]);
    if (name.empty()) {
      throw FormatError(path.string() + ":1: empty material name in column " +
                        std::to_string(i + 1));
    }
    if (!seen.insert(name).second) {
      throw FormatError(path.string() + ":1: duplicate material name '" + name + "'");
    }
    table.names.push_back(std::move(name));
  }
  table.columns.resize(table.names.size());
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto where = path.string() + ":" + std::to_string(row + 1);
    const auto cells = split(lines[row], ',');
    if (cells.size() != header.size()) {
      throw FormatError(where + ": expected " + std::to_string(header.size()) + " cells, found " +
                        std::to_string(cells.size()));
    }
    std::vector<double> parsed;
    for (const auto& cell : cells) {
      const auto v = parse_double(cell);
      if (!v || !std::isfinite(*v)) {
        throw FormatError(where + ": non-numeric cell '" + trim(cell) + "'");
      }
      parsed.push_back(*v);
    }
    if (!table.wavelengths_nm.empty() && !(parsed[0] > table.wavelengths_nm.back())) {
      throw FormatError(where + ": wavelengths must be strictly increasing");
    }
    table.wavelengths_nm.push_back(parsed[0]);
    for (std::size_t i = 1; i < parsed.size(); ++i) table.columns[i - 1].push_back(parsed[i]);
  }
  if (table.wavelengths_nm.empty()) throw FormatError(path.string() + ": no data rows");
  return table;
}

void write_spectral_table(const SpectralTable& table, const fs::path& path) {
  if (table.columns.size() != table.names.size()) {
    throw DomainError("spectral table: column/name count mismatch");
  }
  std::ostringstream os;
  os << "wavelength_nm";
  for (const auto& n : table.names) {
    if (n.empty() || n.find_first_of(",\n\r") != std::string::npos) {
      throw DomainError("spectral table: invalid column name '" + n + "'");
    }
    os << ',' << n;
  }
  os << '\n';
  for (std::size_t row = 0; row < table.wavelengths_nm.size(); ++row) {
    os << format_double(table.wavelengths_nm[row]);
    for (const auto& col : table.columns) {
      if (col.size() != table.wavelengths_nm.size()) {
        throw DomainError("spectral table: ragged column");
      }
      os << ',' << format_double(col[row]);
    }
    os << '\n';
  }
  write_file_atomic(path, os.str());
}

SpectralLibrary read_library(const fs::path& path) {
  const auto table = read_spectral_table(path);
  SpectralLibrary library;
  for (std::size_t i = 0; i < table.names.size(); ++i) {
    library.materials.push_back({table.names[i], table.wavelengths_nm, table.columns[i]});
  }
  validate_read(library, path);
  return library;
}

void write_library(const SpectralLibrary& library, const fs::path& path) {
  library.validate();
  SpectralTable table;
  if (!library.materials.empty()) table.wavelengths_nm = library.materials.front().wavelengths_nm;
  for (const auto& m : library.materials) {
    if (m.wavelengths_nm != table.wavelengths_nm) {
      throw DomainError("library CSV requires all materials on one wavelength grid");
    }
    table.names.push_back(m.name);
    table.columns.push_back(m.reflectance);
  }
  write_spectral_table(table, path);
}

nlohmann::ordered_json report_to_json(const QualityReport& report) {
  nlohmann::ordered_json j;
  j["sae_degrees"] = report.sae_degrees;
  j["mse_per_band"] = report.mse_per_band;
  auto psnr = nlohmann::ordered_json::array();
  for (const auto& p : report.psnr_per_band_db) {
    psnr.push_back(p ? nlohmann::ordered_json(*p) : nlohmann::ordered_json(nullptr));
  }
  j["psnr_per_band_db"] = std::move(psnr);
  j["psnr_mean_db"] = report.psnr_mean_db ? nlohmann::ordered_json(*report.psnr_mean_db)
                                          : nlohmann::ordered_json(nullptr);
  j["parameters"] = report.parameters;
  return j;
}

QualityReport report_from_json(const nlohmann::ordered_json& j) {
  QualityReport r;
  try {
    r.sae_degrees = j.at("sae_degrees").get<double>();
    r.mse_per_band = j.at("mse_per_band").get<std::vector<double>>();
    for (const auto& p : j.at("psnr_per_band_db")) {
      r.psnr_per_band_db.push_back(p.is_null() ? std::nullopt
                                               : std::optional<double>(p.get<double>()));
    }
    const auto& mean = j.at("psnr_mean_db");
    r.psnr_mean_db = mean.is_null() ? std::nullopt : std::optional<double>(mean.get<double>());
    r.parameters = j.at("parameters");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
  r.validate();
  return r;
}

QualityReport read_report(const fs::path& path) {
  try {
    return report_from_json(read_json(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_report(const QualityReport& report, const fs::path& path) {
  report.validate();
  write_json(report_to_json(report), path);
}

nlohmann::ordered_json read_json(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const nlohmann::ordered_json& json, const fs::path& path) {
  write_file_atomic(path, json.dump(2) + "\n");
}

}  // namespace hyperfuse::io
