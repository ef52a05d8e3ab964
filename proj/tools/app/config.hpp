#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

#include "hyperfuse/fuse.hpp"
#include "hyperfuse/segment.hpp"
#include "hyperfuse/simulate.hpp"
#include "hyperfuse/unmix.hpp"

namespace hyperfuse::app {

namespace fs = std::filesystem;

struct Paths {
  fs::path labels;
  fs::path library;
  fs::path out = "out";
  // Stage inputs; default to the files an earlier stage writes into `out`.
  std::optional<fs::path> lowres;
  std::optional<fs::path> pan;
  std::optional<fs::path> reference;
  std::optional<fs::path> estimate;
  std::optional<fs::path> mask;
};

/// Everything a run needs. Module seeds derive from `seed`.
struct PipelineConfig {
  Paths paths;
  std::uint64_t seed = 0;
  int threads = 1;
  int scale = 3;

  // simulation
  std::optional<double> snr_db;
  simulate::WavelengthRange pan_range{};
  std::size_t bands = 50;
  std::optional<simulate::WavelengthRange> wavelength_range;  // default: library common support
  std::map<int, std::string> class_mapping;

  // unmixing
  std::optional<std::size_t> endmembers;  // default: number of mapped classes
  int nmf_max_iter = 500;
  double nmf_tol = 1e-6;
  double epsilon_guard = 1e-12;
  unmix::NmfInitMethod nmf_init = unmix::NmfInitMethod::successive_projection;
  bool rescale_to_unit_sum = true;

  // segmentation and fusion
  double fuzzifier = 2.0;
  int fcm_max_iter = 100;
  double fcm_tol = 1e-6;
  double distinct_delta = 0.1;
  double abundance_threshold = 0.05;

  simulate::SimulationConfig simulation_config() const;
  unmix::NmfConfig nmf_config() const;
  fuse::FusionConfig fusion_config() const;

  fs::path lowres_path() const { return paths.lowres.value_or(paths.out / "lowres.bsq"); }
  fs::path pan_path() const { return paths.pan.value_or(paths.out / "pan.bsq"); }
  fs::path reference_path() const { return paths.reference.value_or(paths.out / "hr.bsq"); }
  fs::path estimate_path() const { return paths.estimate.value_or(paths.out / "fused.bsq"); }

  /// Throws DomainError when a setting is out of range.
  void validate() const;
};

unmix::NmfInitMethod init_method_from(const std::string& name);
std::string to_string(unmix::NmfInitMethod method);

/// Parses a config document; relative paths resolve against `base_dir`.
PipelineConfig config_from_json(const nlohmann::ordered_json& json, const fs::path& base_dir);
nlohmann::ordered_json config_to_json(const PipelineConfig& cfg);

}  // namespace hyperfuse::app
