#include "hyperfuse/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hyperfuse/error.hpp"
#include "hyperfuse/random.hpp"

namespace hyperfuse::simulate {

void SimulationConfig::validate() const {
  if (scale < 2) throw DomainError("simulation: scale must be >= 2, got " + std::to_string(scale));
  if (!(pan_range.low_nm < pan_range.high_nm)) {
    throw DomainError("simulation: PAN range low must be < high");
  }
  if (snr_db && !std::isfinite(*snr_db)) throw DomainError("simulation: snr_db must be finite");
  for (const auto& [id, name] : class_mapping) {
    if (id <= 0) throw DomainError("simulation: mapped class ids must be > 0, got " +
                                   std::to_string(id));
    if (name.empty()) throw DomainError("simulation: empty material name for class " +
                                        std::to_string(id));
  }
}

std::vector<double> resample_signature(const Material& material,
                                       std::span<const double> target) {
  const auto& wl = material.wavelengths_nm;
  const auto& refl = material.reflectance;
  if (wl.empty() || wl.size() != refl.size()) {
    throw DomainError("resample: material '" + material.name + "' is malformed");
  }
  std::vector<double> out;
  out.reserve(target.size());
  for (double t : target) {
    if (t < wl.front() || t > wl.back()) {
      throw DomainError("resample: wavelength " + std::to_string(t) +
                        " nm outside support of material '" + material.name + "' [" +
                        std::to_string(wl.front()) + ", " + std::to_string(wl.back()) + "]");
    }
    const auto hi = static_cast<std::size_t>(std::lower_bound(wl.begin(), wl.end(), t) - wl.begin());
    if (wl[hi] == t) {
      out.push_back(refl[hi]);
      continue;
    }
    const auto lo = hi - 1;
    const double w = (t - wl[lo]) / (wl[hi] - wl[lo]);
    out.push_back(refl[lo] + w * (refl[hi] - refl[lo]));
  }
  return out;
}

SpectralCube synthesize_hr_cube(const LabelMap& labels, const SpectralLibrary& library,
                                const SimulationConfig& cfg,
                                std::span<const double> target) {
  cfg.validate();
  labels.validate();

  std::map<int, std::vector<double>> signatures;
  for (int label : std::set<int>(labels.labels.begin(), labels.labels.end())) {
    if (label == 0) continue;
    const auto it = cfg.class_mapping.find(label);
    if (it == cfg.class_mapping.end()) {
      throw DomainError("simulation: class " + std::to_string(label) +
                        " has no material in class_mapping");
    }
    signatures[label] = resample_signature(library.find(it->second), target);
  }

  SpectralCube cube(labels.samples, labels.lines, {target.begin(), target.end()});
  for (std::size_t l = 0; l < labels.lines; ++l) {
    for (std::size_t s = 0; s < labels.samples; ++s) {
      const int label = labels.at(l, s);
      if (label != 0) cube.set_spectrum(l, s, signatures.at(label));
    }
  }

  if (cfg.snr_db) {
    double power = 0.0;
    for (float v : cube.values) power += static_cast<double>(v) * v;
    power /= static_cast<double>(cube.values.size());
    const double sigma = std::sqrt(power / std::pow(10.0, *cfg.snr_db / 10.0));
    for (std::size_t i = 0; i < cube.values.size(); ++i) {
      const double noisy = cube.values[i] + sigma * counter_normal(cfg.seed, i);
      cube.values[i] = static_cast<float>(std::max(0.0, noisy));
    }
  }
  cube.validate();
  return cube;
}

SpectralCube downsample(const SpectralCube& cube, int scale) {
  if (scale < 1) throw DomainError("downsample: scale must be >= 1");
  const auto r = static_cast<std::size_t>(scale);
  if (cube.samples % r != 0 || cube.lines % r != 0) {
    throw DomainError("downsample: " + std::to_string(cube.samples) + "x" +
                      std::to_string(cube.lines) + " is not divisible by scale " +
                      std::to_string(scale));
  }
  SpectralCube out(cube.samples / r, cube.lines / r, cube.wavelengths_nm);
  const double area = static_cast<double>(r * r);
  for (std::size_t b = 0; b < cube.bands; ++b) {
    for (std::size_t l = 0; l < out.lines; ++l) {
      for (std::size_t s = 0; s < out.samples; ++s) {
        double sum = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
          for (std::size_t j = 0; j < r; ++j) sum += cube.at(b, l * r + i, s * r + j);
        }
        out.at(b, l, s) = static_cast<float>(sum / area);
      }
    }
  }
  return out;
}

PanImage synthesize_pan(const SpectralCube& cube, WavelengthRange range) {
  std::vector<std::size_t> in_range;
  for (std::size_t b = 0; b < cube.bands; ++b) {
    const double w = cube.wavelengths_nm[b];
    if (range.low_nm <= w && w <= range.high_nm) in_range.push_back(b);
  }
  if (in_range.empty()) {
    throw DomainError("synthesize_pan: no band within [" + std::to_string(range.low_nm) + ", " +
                      std::to_string(range.high_nm) + "] nm");
  }
  PanImage pan(cube.samples, cube.lines);
  const auto n = cube.pixel_count();
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (auto b : in_range) sum += cube.values[b * n + k];
    pan.values[k] = static_cast<float>(sum / static_cast<double>(in_range.size()));
  }
  return pan;
}

std::vector<double> linear_grid(double low_nm, double high_nm, std::size_t count) {
  if (count == 0) throw DomainError("linear_grid: count must be >= 1");
  if (count == 1) return {low_nm};
  if (!(low_nm < high_nm)) throw DomainError("linear_grid: low must be < high");
  std::vector<double> grid(count);
  const double step = (high_nm - low_nm) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = low_nm + step * static_cast<double>(i);
  grid.back() = high_nm;
  return grid;
}

WavelengthRange common_support(const SpectralLibrary& library) {
  if (library.materials.empty()) throw DomainError("library has no materials");
  WavelengthRange r{library.materials.front().wavelengths_nm.front(),
                    library.materials.front().wavelengths_nm.back()};
  for (const auto& m : library.materials) {
    r.low_nm = std::max(r.low_nm, m.wavelengths_nm.front());
    r.high_nm = std::min(r.high_nm, m.wavelengths_nm.back());
  }
  if (!(r.low_nm < r.high_nm)) throw DomainError("library materials share no wavelength range");
  return r;
}

}  // namespace hyperfuse::simulate
