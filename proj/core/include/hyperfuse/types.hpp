#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace hyperfuse {

/// Raster coordinate, line (row) first.
struct Position {
  std::size_t line = 0;
  std::size_t sample = 0;

  bool operator==(const Position&) const = default;
};

/// Band-sequential reflectance cube.
///
/// `values` is laid out band by band, each band row-major:
/// index = (band * lines + line) * samples + sample. Flattened to a matrix
/// the cube is L x N with column n = line * samples + sample.
struct SpectralCube {
  std::size_t samples = 0;
  std::size_t lines = 0;
  std::size_t bands = 0;
  std::vector<double> wavelengths_nm;
  std::vector<float> values;

  SpectralCube() = default;
  /// Zero-filled cube; the band count is taken from the wavelength grid.
  SpectralCube(std::size_t samples, std::size_t lines, std::vector<double> wavelengths_nm);

  std::size_t pixel_count() const noexcept { return samples * lines; }
  std::size_t index(std::size_t band, std::size_t line, std::size_t sample) const noexcept {
    return (band * lines + line) * samples + sample;
  }
  float at(std::size_t band, std::size_t line, std::size_t sample) const {
    return values[index(band, line, sample)];
  }
  float& at(std::size_t band, std::size_t line, std::size_t sample) {
    return values[index(band, line, sample)];
  }

  std::span<const float> band(std::size_t b) const;
  std::span<float> band(std::size_t b);

  std::vector<double> spectrum(std::size_t line, std::size_t sample) const;
  void set_spectrum(std::size_t line, std::size_t sample, std::span<const double> spectrum);

  Eigen::MatrixXd to_matrix() const;
  static SpectralCube from_matrix(const Eigen::MatrixXd& x, std::size_t samples,
                                  std::size_t lines, std::vector<double> wavelengths_nm);

  /// Throws DomainError on any invariant violation.
  void validate() const;

  bool operator==(const SpectralCube&) const = default;
};

struct PanImage {
  std::size_t samples = 0;
  std::size_t lines = 0;
  std::vector<float> values;  // row-major

  PanImage() = default;
  PanImage(std::size_t samples, std::size_t lines)
      : samples(samples), lines(lines), values(samples * lines, 0.0f) {}

  float at(std::size_t line, std::size_t sample) const { return values[line * samples + sample]; }
  float& at(std::size_t line, std::size_t sample) { return values[line * samples + sample]; }

  void validate() const;

  bool operator==(const PanImage&) const = default;
};

/// Integer class raster; 0 is background.
struct LabelMap {
  std::size_t samples = 0;
  std::size_t lines = 0;
  std::vector<int> labels;  // row-major

  LabelMap() = default;
  LabelMap(std::size_t samples, std::size_t lines, int fill = 0)
      : samples(samples), lines(lines), labels(samples * lines, fill) {}

  int at(std::size_t line, std::size_t sample) const { return labels[line * samples + sample]; }
  int& at(std::size_t line, std::size_t sample) { return labels[line * samples + sample]; }

  void validate() const;

  bool operator==(const LabelMap&) const = default;
};

struct Material {
  std::string name;
  std::vector<double> wavelengths_nm;
  std::vector<double> reflectance;

  bool operator==(const Material&) const = default;
};

struct SpectralLibrary {
  std::vector<Material> materials;

  /// Throws DomainError when `name` is absent.
  const Material& find(const std::string& name) const;
  bool contains(const std::string& name) const;
  void validate() const;

  bool operator==(const SpectralLibrary&) const = default;
};

/// Fusion quality summary. PSNR entries are empty for bands with zero MSE
/// (infinite PSNR); the mean is taken over finite bands only and is empty
/// when none is finite.
struct QualityReport {
  double sae_degrees = 0.0;
  std::vector<double> mse_per_band;
  std::vector<std::optional<double>> psnr_per_band_db;
  std::optional<double> psnr_mean_db;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();

  void validate() const;

  bool operator==(const QualityReport&) const = default;
};

}  // namespace hyperfuse
