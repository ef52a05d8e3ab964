#include "hyperfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hyperfuse/error.hpp"

namespace hyperfuse::metrics {

namespace {

void check_geometry(const SpectralCube& a, const SpectralCube& b) {
  if (a.samples != b.samples || a.lines != b.lines || a.bands != b.bands) {
    throw DomainError("metrics: geometry mismatch, reference " + std::to_string(a.samples) + "x" +
                      std::to_string(a.lines) + "x" + std::to_string(a.bands) + " vs estimate " +
                      std::to_string(b.samples) + "x" + std::to_string(b.lines) + "x" +
                      std::to_string(b.bands));
  }
}

void check_mask(const SpectralCube& cube, const LabelMap* mask) {
  if (mask != nullptr && (mask->samples != cube.samples || mask->lines != cube.lines)) {
    throw DomainError("metrics: mask geometry does not match the cubes");
  }
}

std::vector<bool> pixel_selection(const SpectralCube& cube, const LabelMap* mask) {
  std::vector<bool> keep(cube.pixel_count(), true);
  if (mask != nullptr) {
    for (std::size_t k = 0; k < keep.size(); ++k) keep[k] = mask->labels[k] != 0;
  }
  return keep;
}

}  // namespace

double sad(std::span<const double> m, std::span<const double> m_hat) {
  if (m.size() != m_hat.size()) throw DomainError("sad: length mismatch");
  double nm = 0.0;
  double nh = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    nm += m[i] * m[i];
    nh += m_hat[i] * m_hat[i];
  }
  if (nm == 0.0 || nh == 0.0) throw DomainError("sad: undefined angle for a zero-norm spectrum");
  // 2 atan2(|u - v|, |u + v|) on unit vectors: exact zero for parallel input
  // and well conditioned near 0 deg, where acos of the cosine loses digits.
  nm = std::sqrt(nm);
  nh = std::sqrt(nh);
  double diff = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double u = m[i] / nm;
    const double v = m_hat[i] / nh;
    diff += (u - v) * (u - v);
    sum += (u + v) * (u + v);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum)) * 180.0 / std::numbers::pi;
}

SaeSummary sae_summary(const SpectralCube& reference, const SpectralCube& estimate,
                       const LabelMap* mask) {
  check_geometry(reference, estimate);
  check_mask(reference, mask);
  const auto keep = pixel_selection(reference, mask);

  SaeSummary out;
  double sum_sq = 0.0;
  for (std::size_t l = 0; l < reference.lines; ++l) {
    for (std::size_t s = 0; s < reference.samples; ++s) {
      if (!keep[l * reference.samples + s]) {
        ++out.masked;
        continue;
      }
      const auto m = reference.spectrum(l, s);
      const auto m_hat = estimate.spectrum(l, s);
      const auto zero = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
      };
      if (zero(m) || zero(m_hat)) {
        ++out.zero_spectrum;
        continue;
      }
      const double angle = sad(m, m_hat);
      sum_sq += angle * angle;
      ++out.pixels;
    }
  }
  if (out.pixels == 0) throw DomainError("sae: no unmasked pixel with nonzero spectra");
  out.degrees = std::sqrt(sum_sq / static_cast<double>(out.pixels));
  return out;
}

double sae(const SpectralCube& reference, const SpectralCube& estimate, const LabelMap* mask) {
  return sae_summary(reference, estimate, mask).degrees;
}

double mse_band(std::span<const float> reference, std::span<const float> estimate) {
  if (reference.size() != estimate.size()) throw DomainError("mse: band size mismatch");
  if (reference.empty()) throw DomainError("mse: empty band");
  double sum = 0.0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const double d = static_cast<double>(reference[k]) - static_cast<double>(estimate[k]);
    sum += d * d;
  }
  return sum / static_cast<double>(reference.size());
}

std::optional<double> psnr(double max_value, double mse) {
  if (!(max_value > 0.0)) throw DomainError("psnr: MAX must be > 0");
  if (mse < 0.0) throw DomainError("psnr: MSE must be >= 0");
  if (mse == 0.0) return std::nullopt;
  return 10.0 * std::log10(max_value * max_value / mse);
}

std::optional<double> psnr_band(std::span<const float> reference, std::span<const float> estimate) {
  const double mse = mse_band(reference, estimate);
  const double max_value = *std::max_element(reference.begin(), reference.end());
  if (max_value <= 0.0) throw DomainError("psnr: reference band is all zero (MAX = 0)");
  return psnr(max_value, mse);
}

QualityReport evaluate(const SpectralCube& reference, const SpectralCube& estimate,
                       const LabelMap* mask) {
  check_geometry(reference, estimate);
  check_mask(reference, mask);
  const auto summary = sae_summary(reference, estimate, mask);
  const auto keep = pixel_selection(reference, mask);

  QualityReport report;
  report.sae_degrees = summary.degrees;
  std::vector<float> ref_band;
  std::vector<float> est_band;
  double psnr_sum = 0.0;
  std::size_t finite = 0;
  for (std::size_t b = 0; b < reference.bands; ++b) {
    ref_band.clear();
    est_band.clear();
    const auto rb = reference.band(b);
    const auto eb = estimate.band(b);
    for (std::size_t k = 0; k < rb.size(); ++k) {
      if (!keep[k]) continue;
      ref_band.push_back(rb[k]);
      est_band.push_back(eb[k]);
    }
    report.mse_per_band.push_back(mse_band(ref_band, est_band));
    const auto p = psnr_band(ref_band, est_band);
    report.psnr_per_band_db.push_back(p);
    if (p) {
      psnr_sum += *p;
      ++finite;
    }
  }
  if (finite > 0) report.psnr_mean_db = psnr_sum / static_cast<double>(finite);

  auto& params = report.parameters;
  params["bands"] = reference.bands;
  params["samples"] = reference.samples;
  params["lines"] = reference.lines;
  params["sae_pixels"] = summary.pixels;
  params["masked_pixels"] = summary.masked;
  params["zero_spectrum_pixels_excluded"] = summary.zero_spectrum;
  params["psnr_max_source"] = "reference";
  params["psnr_aggregation"] = "mean_of_finite_bands";
  params["psnr_infinite_bands"] = reference.bands - finite;
  return report;
}

}  // namespace hyperfuse::metrics
