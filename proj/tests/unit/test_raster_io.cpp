#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "hyperfuse/error.hpp"
#include "hyperfuse/raster_io.hpp"
#include "support/temp_dir.hpp"

using namespace hyperfuse;
using hyperfuse::testing::TempDir;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

SpectralCube sample_cube() {
  SpectralCube cube(2, 2, {450.0, 550.5, 650.25});
  for (std::size_t i = 0; i < cube.values.size(); ++i) {
    cube.values[i] = 0.1f * static_cast<float>(i) + 1e-7f;
  }
  return cube;
}

bool same_bits(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("cube round trip is bit exact") {
  TempDir dir;
  const auto cube = sample_cube();
  io::write_cube(cube, dir / "c.bsq");
  CHECK(fs::exists(dir / "c.hdr"));
  const auto back = io::read_cube(dir / "c.bsq");
  CHECK(back == cube);
  CHECK(same_bits(back.values, cube.values));
  CHECK(back.wavelengths_nm == cube.wavelengths_nm);
}

TEST_CASE("cube round trip keeps awkward float values") {
  TempDir dir;
  SpectralCube cube(3, 1, {1.0 / 3.0});
  cube.values = {std::numeric_limits<float>::denorm_min(), 1.0f / 3.0f,
                 std::numeric_limits<float>::max()};
  io::write_cube(cube, dir / "odd.bsq");
  CHECK(same_bits(io::read_cube(dir / "odd.bsq").values, cube.values));
  CHECK(io::read_cube(dir / "odd.bsq").wavelengths_nm[0] == 1.0 / 3.0);
}

TEST_CASE("1x1x1 cube gives a 4-byte data file") {
  TempDir dir;
  SpectralCube cube(1, 1, {500.0});
  cube.values[0] = 0.25f;
  io::write_cube(cube, dir / "one.bsq");
  CHECK(fs::file_size(dir / "one.bsq") == 4);
  CHECK(fs::exists(dir / "one.hdr"));
}

TEST_CASE("data file is little-endian band sequential") {
  TempDir dir;
  SpectralCube cube(2, 1, {500.0, 600.0});
  cube.at(0, 0, 0) = 1.0f;
  cube.at(0, 0, 1) = 2.0f;
  cube.at(1, 0, 0) = 3.0f;
  cube.at(1, 0, 1) = 4.0f;
  io::write_cube(cube, dir / "o.bsq");
  const auto raw = io::read_file(dir / "o.bsq");
  REQUIRE(raw.size() == 16);
  const unsigned char* b = reinterpret_cast<const unsigned char*>(raw.data());
  // 2.0f = 0x40000000, stored as 00 00 00 40 at the second slot.
  CHECK(b[4] == 0x00);
  CHECK(b[7] == 0x40);
  float f[4];
  std::memcpy(f, raw.data(), 16);
  CHECK(f[0] == 1.0f);
  CHECK(f[1] == 2.0f);
  CHECK(f[2] == 3.0f);
  CHECK(f[3] == 4.0f);
}

TEST_CASE("header lists the documented keys") {
  TempDir dir;
  io::write_cube(sample_cube(), dir / "c.bsq");
  const auto hdr = io::read_file(dir / "c.hdr");
  CHECK(hdr.rfind("ENVI", 0) == 0);
  for (const char* key : {"samples = 2", "lines = 2", "bands = 3", "data type = 4",
                          "interleave = bsq", "byte order = 0", "wavelength = {"}) {
    CHECK_MESSAGE(hdr.find(key) != std::string::npos, key);
  }
}

TEST_CASE("bands and wavelength count must agree") {
  TempDir dir;
  io::write_cube(sample_cube(), dir / "c.bsq");
  write_text(dir / "c.hdr",
             "ENVI\nsamples = 2\nlines = 2\nbands = 3\ndata type = 4\ninterleave = bsq\n"
             "byte order = 0\nwavelength = { 450, 550 }\n");
  CHECK_THROWS_AS(io::read_cube(dir / "c.bsq"), FormatError);
}

TEST_CASE("truncated data file is a size mismatch") {
  TempDir dir;
  io::write_cube(sample_cube(), dir / "c.bsq");
  const auto raw = io::read_file(dir / "c.bsq");
  write_text(dir / "c.bsq", raw.substr(0, raw.size() - 4));
  try {
    io::read_cube(dir / "c.bsq");
    FAIL("expected a size mismatch");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("size mismatch") != std::string::npos);
  }
}

TEST_CASE("garbled or missing header keys are rejected") {
  TempDir dir;
  io::write_cube(sample_cube(), dir / "c.bsq");
  const std::string good = io::read_file(dir / "c.hdr");

  auto replace = [&](const std::string& from, const std::string& to) {
    auto text = good;
    text.replace(text.find(from), from.size(), to);
    write_text(dir / "c.hdr", text);
  };
  replace("samples = 2", "samples = two");
  CHECK_THROWS_AS(io::read_cube(dir / "c.bsq"), FormatError);
  replace("data type = 4", "data type = 2");
  CHECK_THROWS_AS(io::read_cube(dir / "c.bsq"), FormatError);
  replace("interleave = bsq", "interleave = bil");
  CHECK_THROWS_AS(io::read_cube(dir / "c.bsq"), FormatError);
  replace("byte order = 0", "byte order = 1");
  CHECK_THROWS_AS(io::read_cube(dir / "c.bsq"), FormatError);
  replace("lines = 2\n", "");
  CHECK_THROWS_AS(io::read_cube(dir / "c.bsq"), FormatError);
}

TEST_CASE("non-increasing wavelengths in a header are rejected") {
  TempDir dir;
  io::write_cube(sample_cube(), dir / "c.bsq");
  write_text(dir / "c.hdr",
             "ENVI\nsamples = 2\nlines = 2\nbands = 3\ndata type = 4\ninterleave = bsq\n"
             "byte order = 0\nwavelength = { 450, 450, 650 }\n");
  CHECK_THROWS_AS(io::read_cube(dir / "c.bsq"), FormatError);
}

TEST_CASE("missing files are io errors") {
  TempDir dir;
  CHECK_THROWS_AS(io::read_cube(dir / "absent.bsq"), IoError);
  io::write_cube(sample_cube(), dir / "c.bsq");
  fs::remove(dir / "c.bsq");
  CHECK_THROWS_AS(io::read_cube(dir / "c.bsq"), IoError);
}

TEST_CASE("NaN cube is rejected before writing") {
  TempDir dir;
  auto cube = sample_cube();
  cube.values[3] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(io::write_cube(cube, dir / "nan.bsq"), DomainError);
  CHECK_FALSE(fs::exists(dir / "nan.bsq"));
  CHECK_FALSE(fs::exists(dir / "nan.hdr"));
}

TEST_CASE("PAN round trip is bit exact") {
  TempDir dir;
  PanImage pan(3, 2);
  for (std::size_t i = 0; i < pan.values.size(); ++i) pan.values[i] = std::sqrt(float(i) + 0.5f);
  io::write_pan(pan, dir / "pan.bsq");
  const auto back = io::read_pan(dir / "pan.bsq");
  CHECK(back == pan);
  CHECK(same_bits(back.values, pan.values));
  CHECK(io::read_file(dir / "pan.hdr").find("bands = 1") != std::string::npos);
}

TEST_CASE("a multi-band cube is not a PAN image") {
  TempDir dir;
  io::write_cube(sample_cube(), dir / "c.bsq");
  CHECK_THROWS_AS(io::read_pan(dir / "c.bsq"), FormatError);
}

TEST_CASE("label CSV parses row-major") {
  TempDir dir;
  write_text(dir / "l.csv", "1,2\n0,1\n");
  const auto labels = io::read_labels(dir / "l.csv");
  CHECK(labels.samples == 2);
  CHECK(labels.lines == 2);
  CHECK(labels.labels == std::vector<int>{1, 2, 0, 1});
}

TEST_CASE("label CSV round trip") {
  TempDir dir;
  LabelMap labels(3, 2);
  labels.labels = {0, 1, 2, 3, 4, 12};
  io::write_labels(labels, dir / "l.csv");
  CHECK(io::read_labels(dir / "l.csv") == labels);
}

TEST_CASE("label CSV errors") {
  TempDir dir;
  write_text(dir / "ragged.csv", "1,2\n0\n");
  CHECK_THROWS_AS(io::read_labels(dir / "ragged.csv"), FormatError);
  write_text(dir / "neg.csv", "1,-2\n0,1\n");
  CHECK_THROWS_AS(io::read_labels(dir / "neg.csv"), DomainError);
  write_text(dir / "frac.csv", "1,2.5\n0,1\n");
  CHECK_THROWS_AS(io::read_labels(dir / "frac.csv"), FormatError);
  write_text(dir / "word.csv", "1,x\n0,1\n");
  CHECK_THROWS_AS(io::read_labels(dir / "word.csv"), FormatError);
}

TEST_CASE("library CSV with 3 rows and 2 materials") {
  TempDir dir;
  write_text(dir / "lib.csv", "wavelength_nm,grass,soil\n400,0.1,0.3\n500,0.2,0.35\n600,0.4,0.4\n");
  const auto lib = io::read_library(dir / "lib.csv");
  REQUIRE(lib.materials.size() == 2);
  CHECK(lib.materials[0].name == "grass");
  CHECK(lib.materials[1].name == "soil");
  CHECK(lib.materials[0].wavelengths_nm == std::vector<double>{400, 500, 600});
  CHECK(lib.materials[1].reflectance == std::vector<double>{0.3, 0.35, 0.4});
}

TEST_CASE("library CSV errors") {
  TempDir dir;
  write_text(dir / "unsorted.csv", "wavelength_nm,a\n500,0.1\n400,0.2\n");
  CHECK_THROWS_AS(io::read_library(dir / "unsorted.csv"), FormatError);
  write_text(dir / "empty_name.csv", "wavelength_nm,a,\n400,0.1,0.2\n");
  CHECK_THROWS_AS(io::read_library(dir / "empty_name.csv"), FormatError);
  write_text(dir / "dup.csv", "wavelength_nm,a,a\n400,0.1,0.2\n");
  CHECK_THROWS_AS(io::read_library(dir / "dup.csv"), FormatError);
  write_text(dir / "nan.csv", "wavelength_nm,a\n400,abc\n");
  CHECK_THROWS_AS(io::read_library(dir / "nan.csv"), FormatError);
  write_text(dir / "range.csv", "wavelength_nm,a\n400,1.7\n");
  CHECK_THROWS_AS(io::read_library(dir / "range.csv"), FormatError);
}

TEST_CASE("library round trip") {
  TempDir dir;
  SpectralLibrary lib;
  lib.materials.push_back({"a", {400.0, 410.5}, {0.1, 1.0 / 3.0}});
  lib.materials.push_back({"b", {400.0, 410.5}, {0.7, 0.0}});
  io::write_library(lib, dir / "lib.csv");
  CHECK(io::read_library(dir / "lib.csv") == lib);
}

TEST_CASE("report round trip keeps exact decimals and infinite bands") {
  TempDir dir;
  QualityReport r;
  r.sae_degrees = 0.1 + 0.2;
  r.mse_per_band = {1.0 / 3.0, 0.0, 2e-300};
  r.psnr_per_band_db = {47.77121254719662, std::nullopt, 1.0 / 7.0};
  r.psnr_mean_db = (r.psnr_per_band_db[0].value() + r.psnr_per_band_db[2].value()) / 2.0;
  r.parameters["bands"] = 3;
  io::write_report(r, dir / "r.json");
  const auto back = io::read_report(dir / "r.json");
  CHECK(back == r);
  const auto j = io::read_json(dir / "r.json");
  CHECK(j.at("psnr_per_band_db").at(1).is_null());
  for (const char* key : {"sae_degrees", "mse_per_band", "psnr_per_band_db", "psnr_mean_db",
                          "parameters"}) {
    CHECK(j.contains(key));
  }
}

TEST_CASE("report with no finite PSNR stores a null mean") {
  TempDir dir;
  QualityReport r;
  r.mse_per_band = {0.0};
  r.psnr_per_band_db = {std::nullopt};
  io::write_report(r, dir / "r.json");
  CHECK(io::read_json(dir / "r.json").at("psnr_mean_db").is_null());
  CHECK(io::read_report(dir / "r.json") == r);
}

TEST_CASE("format_double is shortest round trip") {
  for (double v : {0.1, 1.0 / 3.0, 1e-310, 123456789.125, -0.0, 5e-324}) {
    const auto text = io::format_double(v);
    double back = 1.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == v);
    CHECK(std::signbit(back) == std::signbit(v));
  }
  CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("atomic write leaves no temp file and replaces old content") {
  TempDir dir;
  io::write_file_atomic(dir / "f.txt", "old");
  io::write_file_atomic(dir / "f.txt", "new");
  CHECK(io::read_file(dir / "f.txt") == "new");
  CHECK(std::distance(fs::directory_iterator(dir.path()), fs::directory_iterator()) == 1);
}

TEST_CASE("unwritable path is an io error") {
  TempDir dir;
  write_text(dir / "file", "x");
  CHECK_THROWS_AS(io::write_cube(sample_cube(), dir / "file" / "c.bsq"), IoError);
}
