#pragma once

#include <optional>
#include <span>

#include "hyperfuse/types.hpp"

/// Reconstruction quality: spectral angle (SAD per pixel, SAE as its rms
/// over the scene, in degrees) and per-band MSE / PSNR.
namespace hyperfuse::metrics {

/// Angle between two spectra in degrees. Throws DomainError for a zero
/// vector or a length mismatch.
double sad(std::span<const double> m, std::span<const double> m_hat);

struct SaeSummary {
  double degrees = 0.0;
  std::size_t pixels = 0;         // pixels that entered the rms
  std::size_t masked = 0;         // background pixels skipped by the mask
  std::size_t zero_spectrum = 0;  // skipped because either spectrum is all zero
};

/// rms of SAD over all pixels whose mask label is nonzero (every pixel
/// without a mask) and whose spectra are both nonzero.
SaeSummary sae_summary(const SpectralCube& reference, const SpectralCube& estimate,
                       const LabelMap* mask = nullptr);
double sae(const SpectralCube& reference, const SpectralCube& estimate,
           const LabelMap* mask = nullptr);

/// Mean squared difference of two equally sized bands.
double mse_band(std::span<const float> reference, std::span<const float> estimate);

/// 10 log10(max^2 / mse); empty for mse == 0 (infinite PSNR).
std::optional<double> psnr(double max_value, double mse);

/// PSNR with MAX taken from the reference band. Throws DomainError when the
/// reference band is all zero.
std::optional<double> psnr_band(std::span<const float> reference, std::span<const float> estimate);

/// Full report; per-band MSE / PSNR are computed over unmasked pixels and
/// the mean PSNR over bands with finite PSNR.
QualityReport evaluate(const SpectralCube& reference, const SpectralCube& estimate,
                       const LabelMap* mask = nullptr);

}  // namespace hyperfuse::metrics
