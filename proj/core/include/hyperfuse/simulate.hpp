#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperfuse/types.hpp"

/// Simulated scene generation: a high-resolution cube painted from a class
/// map and a spectral library, its box-downsampled low-resolution
/// counterpart, and a panchromatic image averaged over the visible bands.
namespace hyperfuse::simulate {

struct WavelengthRange {
  double low_nm = 400.0;
  double high_nm = 700.0;
};

struct SimulationConfig {
  int scale = 3;
  std::optional<double> snr_db;  // empty: noiseless
  WavelengthRange pan_range{};
  std::map<int, std::string> class_mapping;  // class id -> material name
  std::uint64_t seed = 0;

  void validate() const;
};

/// Piecewise-linear interpolation of `material` onto `target_wavelengths_nm`.
/// Throws DomainError for targets outside the material's sampled support.
std::vector<double> resample_signature(const Material& material,
                                       std::span<const double> target_wavelengths_nm);

/// Every pixel of class c carries the resampled signature of
/// `class_mapping[c]`; background pixels are all zero. With `snr_db` set,
/// Gaussian noise with variance mean(x^2) / 10^(snr/10) is added per value
/// from a counter-based stream and the result is clamped at zero.
SpectralCube synthesize_hr_cube(const LabelMap& labels, const SpectralLibrary& library,
                                const SimulationConfig& cfg,
                                std::span<const double> target_wavelengths_nm);

/// Non-overlapping scale x scale box mean per band.
SpectralCube downsample(const SpectralCube& cube, int scale);

/// Unweighted per-pixel mean over bands with low <= wavelength <= high.
PanImage synthesize_pan(const SpectralCube& cube, WavelengthRange range = {});

/// `count` evenly spaced wavelengths from `low` to `high` inclusive.
std::vector<double> linear_grid(double low_nm, double high_nm, std::size_t count);

/// Wavelength interval covered by every material in the library.
WavelengthRange common_support(const SpectralLibrary& library);

}  // namespace hyperfuse::simulate
