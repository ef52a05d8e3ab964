#include "hyperfuse/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hyperfuse/error.hpp"

namespace hyperfuse {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

template <typename T>
void require_finite_nonnegative(std::span<const T> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0) {
      std::ostringstream os;
      os << what << ": value " << values[i] << " at index " << i << " is not finite and >= 0";
      throw DomainError(os.str());
    }
  }
}

bool strictly_increasing(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(),
                            [](double a, double b) { return !(a < b); }) == v.end();
}

}  // namespace

SpectralCube::SpectralCube(std::size_t samples_, std::size_t lines_,
                           std::vector<double> wavelengths)
    : samples(samples_),
      lines(lines_),
      bands(wavelengths.size()),
      wavelengths_nm(std::move(wavelengths)),
      values(samples_ * lines_ * bands, 0.0f) {}

std::span<const float> SpectralCube::band(std::size_t b) const {
  return std::span<const float>(values).subspan(b * pixel_count(), pixel_count());
}

std::span<float> SpectralCube::band(std::size_t b) {
  return std::span<float>(values).subspan(b * pixel_count(), pixel_count());
}

std::vector<double> SpectralCube::spectrum(std::size_t line, std::size_t sample) const {
  std::vector<double> out(bands);
  for (std::size_t b = 0; b < bands; ++b) out[b] = at(b, line, sample);
  return out;
}

void SpectralCube::set_spectrum(std::size_t line, std::size_t sample,
                                std::span<const double> spectrum) {
  if (spectrum.size() != bands) throw DomainError("set_spectrum: band count mismatch");
  for (std::size_t b = 0; b < bands; ++b) at(b, line, sample) = static_cast<float>(spectrum[b]);
}

Eigen::MatrixXd SpectralCube::to_matrix() const {
  const auto n = pixel_count();
  Eigen::MatrixXd x(bands, n);
  for (std::size_t b = 0; b < bands; ++b) {
    const auto src = band(b);
    for (std::size_t k = 0; k < n; ++k) x(b, k) = src[k];
  }
  return x;
}

SpectralCube SpectralCube::from_matrix(const Eigen::MatrixXd& x, std::size_t samples,
                                       std::size_t lines, std::vector<double> wavelengths) {
  if (static_cast<std::size_t>(x.rows()) != wavelengths.size() ||
      static_cast<std::size_t>(x.cols()) != samples * lines) {
    throw DomainError("from_matrix: matrix shape does not match cube geometry");
  }
  SpectralCube cube(samples, lines, std::move(wavelengths));
  for (std::size_t b = 0; b < cube.bands; ++b) {
    auto dst = cube.band(b);
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = static_cast<float>(x(b, k));
  }
  return cube;
}

void SpectralCube::validate() const {
  require(samples >= 1 && lines >= 1 && bands >= 1, "cube: samples, lines and bands must be >= 1");
  require(wavelengths_nm.size() == bands, "cube: wavelength count " +
                                              std::to_string(wavelengths_nm.size()) +
                                              " does not match bands " + std::to_string(bands));
  require(values.size() == samples * lines * bands, "cube: value count does not match geometry");
  require(strictly_increasing(wavelengths_nm), "cube: wavelengths must be strictly increasing");
  require(std::all_of(wavelengths_nm.begin(), wavelengths_nm.end(),
                      [](double w) { return std::isfinite(w) && w > 0; }),
          "cube: wavelengths must be finite and > 0");
  require_finite_nonnegative<float>(values, "cube");
}

void PanImage::validate() const {
  require(samples >= 1 && lines >= 1, "pan: samples and lines must be >= 1");
  require(values.size() == samples * lines, "pan: value count does not match geometry");
  require_finite_nonnegative<float>(values, "pan");
}

void LabelMap::validate() const {
  require(samples >= 1 && lines >= 1, "labels: samples and lines must be >= 1");
  require(labels.size() == samples * lines, "labels: label count does not match geometry");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0, "labels: negative label " + std::to_string(labels[i]) +
                                " at line " + std::to_string(i / samples + 1));
  }
}

const Material& SpectralLibrary::find(const std::string& name) const {
  const auto it = std::find_if(materials.begin(), materials.end(),
                               [&](const Material& m) { return m.name == name; });
  if (it == materials.end()) throw DomainError("library: unknown material '" + name + "'");
  return *it;
}

bool SpectralLibrary::contains(const std::string& name) const {
  return std::any_of(materials.begin(), materials.end(),
                     [&](const Material& m) { return m.name == name; });
}

void SpectralLibrary::validate() const {
  std::set<std::string> seen;
  for (const auto& m : materials) {
    require(!m.name.empty(), "library: empty material name");
    require(seen.insert(m.name).second, "library: duplicate material name '" + m.name + "'");
    require(!m.wavelengths_nm.empty(), "library: material '" + m.name + "' has no samples");
    require(m.wavelengths_nm.size() == m.reflectance.size(),
            "library: material '" + m.name + "' wavelength/reflectance length mismatch");
    require(strictly_increasing(m.wavelengths_nm),
            "library: material '" + m.name + "' wavelengths must be strictly increasing");
    for (double r : m.reflectance) {
      require(std::isfinite(r) && r >= 0.0 && r <= 1.5,
              "library: material '" + m.name + "' reflectance outside [0, 1.5]");
    }
  }
}

void QualityReport::validate() const {
  require(std::isfinite(sae_degrees) && sae_degrees >= 0.0 && sae_degrees <= 180.0,
          "report: sae_degrees outside [0, 180]");
  require(mse_per_band.size() == psnr_per_band_db.size(),
          "report: per-band lists differ in length");
  for (double m : mse_per_band) require(std::isfinite(m) && m >= 0.0, "report: negative MSE");
}

}  // namespace hyperfuse
