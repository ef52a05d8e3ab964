#include "app/commands.hpp"

#include <sstream>

#include <spdlog/spdlog.h>

#include "hyperfuse/error.hpp"
#include "hyperfuse/fuse.hpp"
#include "hyperfuse/metrics.hpp"
#include "hyperfuse/raster_io.hpp"
#include "hyperfuse/simulate.hpp"
#include "hyperfuse/unmix.hpp"

namespace hyperfuse::app {

namespace {

using json = nlohmann::ordered_json;

void require_file(const fs::path& path, const char* what) {
  if (path.empty()) throw IoError(std::string("no ") + what + " path configured");
  if (!fs::exists(path)) throw IoError(std::string(what) + " not found: " + path.string());
}

void prepare_out(const PipelineConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.paths.out, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.paths.out.string());
}

void write_manifest(const PipelineConfig& cfg, const std::string& stage, json outputs) {
  json manifest;
  manifest["stage"] = stage;
  manifest["config"] = config_to_json(cfg);
  manifest["outputs"] = std::move(outputs);
  io::write_json(manifest, cfg.paths.out / ("manifest_" + stage + ".json"));
}

fs::path signatures_path(const PipelineConfig& cfg) { return cfg.paths.out / "signatures.csv"; }
fs::path abundances_path(const PipelineConfig& cfg) { return cfg.paths.out / "abundances.bsq"; }

}  // namespace

int exit_code(ErrorKind kind) noexcept { return kind == ErrorKind::domain ? 3 : 2; }

void cmd_simulate(const PipelineConfig& cfg) {
  require_file(cfg.paths.labels, "label map");
  require_file(cfg.paths.library, "spectral library");
  cfg.validate();
  const auto labels = io::read_labels(cfg.paths.labels);
  const auto library = io::read_library(cfg.paths.library);
  const auto range = cfg.wavelength_range.value_or(simulate::common_support(library));
  const auto grid = simulate::linear_grid(range.low_nm, range.high_nm, cfg.bands);
  const auto sim = cfg.simulation_config();

  spdlog::info("simulate: {}x{} labels, {} bands {:.1f}-{:.1f} nm, scale {}", labels.samples,
               labels.lines, grid.size(), range.low_nm, range.high_nm, sim.scale);
  const auto hr = simulate::synthesize_hr_cube(labels, library, sim, grid);
  const auto lowres = simulate::downsample(hr, sim.scale);
  const auto pan = simulate::synthesize_pan(hr, sim.pan_range);

  prepare_out(cfg);
  const auto out = cfg.paths.out;
  io::write_cube(hr, out / "hr.bsq");
  io::write_cube(lowres, cfg.lowres_path());
  io::write_pan(pan, cfg.pan_path());
  write_manifest(cfg, "simulate",
                 {{"hr", (out / "hr.bsq").string()},
                  {"lowres", cfg.lowres_path().string()},
                  {"pan", cfg.pan_path().string()},
                  {"wavelengths_nm", grid}});
}

void cmd_unmix(const PipelineConfig& cfg) {
  require_file(cfg.lowres_path(), "low-resolution cube");
  require_file(io::header_path(cfg.lowres_path()), "low-resolution cube header");
  cfg.validate();
  const auto lowres = io::read_cube(cfg.lowres_path());
  const auto nmf_cfg = cfg.nmf_config();
  if (nmf_cfg.endmembers == 0) {
    throw DomainError("endmember count unknown; set nmf.endmembers or --endmembers");
  }

  spdlog::info("unmix: {} bands, {} pixels, {} endmembers", lowres.bands, lowres.pixel_count(),
               nmf_cfg.endmembers);
  auto result = unmix::nmf_unmix(lowres, nmf_cfg);
  for (const auto& w : result.warnings) spdlog::warn("unmix: {}", w);
  spdlog::info("unmix: {} iterations, cost {:.6g} -> {:.6g}", result.iterations,
               result.cost_trace.front(), result.cost_trace.back());

  auto model = std::move(result.model);
  if (cfg.rescale_to_unit_sum) model = unmix::rescale_to_unit_sum(model);
  model = unmix::normalize_abundances(model, nmf_cfg.epsilon_guard);

  prepare_out(cfg);
  unmix::write_model(model, signatures_path(cfg), abundances_path(cfg));
  std::ostringstream trace;
  trace << "iteration,cost\n";
  for (std::size_t i = 0; i < result.cost_trace.size(); ++i) {
    trace << i << ',' << io::format_double(result.cost_trace[i]) << '\n';
  }
  const auto trace_path = cfg.paths.out / "cost_trace.csv";
  io::write_file_atomic(trace_path, trace.str());
  write_manifest(cfg, "unmix",
                 {{"signatures", signatures_path(cfg).string()},
                  {"abundances", abundances_path(cfg).string()},
                  {"cost_trace", trace_path.string()},
                  {"iterations", result.iterations},
                  {"final_cost", result.cost_trace.back()}});
}

void cmd_fuse(const PipelineConfig& cfg) {
  require_file(cfg.lowres_path(), "low-resolution cube");
  require_file(cfg.pan_path(), "PAN image");
  require_file(signatures_path(cfg), "endmember signatures");
  require_file(abundances_path(cfg), "abundance cube");
  cfg.validate();
  const auto lowres = io::read_cube(cfg.lowres_path());
  const auto pan = io::read_pan(cfg.pan_path());
  // Abundances come back as float32; renormalize so every column sums to 1.
  const auto model = unmix::normalize_abundances(
      unmix::read_model(signatures_path(cfg), abundances_path(cfg)), cfg.epsilon_guard);
  const auto fusion = cfg.fusion_config();

  spdlog::info("fuse: {}x{} superpixels at scale {}", lowres.samples, lowres.lines, fusion.scale);
  const auto scene = fuse::fuse_scene(lowres, pan, model, fusion);
  const auto ambiguous = std::count_if(scene.assignments.begin(), scene.assignments.end(),
                                       [](const fuse::Assignment& a) { return a.ambiguous; });
  spdlog::info("fuse: {} of {} superpixels needed the spatial tie-break", ambiguous,
               scene.assignments.size());
  const auto fused = fuse::reconstruct_hr(scene.map, model);

  prepare_out(cfg);
  const auto map_path = cfg.paths.out / "subpixel_map.csv";
  fuse::write_subpixel_map(scene.map, map_path);
  io::write_cube(fused, cfg.estimate_path());
  write_manifest(cfg, "fuse",
                 {{"subpixel_map", map_path.string()},
                  {"fused", cfg.estimate_path().string()},
                  {"ambiguous_superpixels", ambiguous}});
}

void cmd_evaluate(const PipelineConfig& cfg) {
  require_file(cfg.reference_path(), "reference cube");
  require_file(cfg.estimate_path(), "estimate cube");
  if (cfg.paths.mask) require_file(*cfg.paths.mask, "mask");
  cfg.validate();
  const auto reference = io::read_cube(cfg.reference_path());
  const auto estimate = io::read_cube(cfg.estimate_path());

  std::optional<LabelMap> mask;
  if (cfg.paths.mask) {
    mask = io::read_labels(*cfg.paths.mask);
  } else if (!cfg.paths.labels.empty() && fs::exists(cfg.paths.labels)) {
    auto labels = io::read_labels(cfg.paths.labels);
    if (labels.samples == reference.samples && labels.lines == reference.lines) mask = labels;
  }

  auto report = metrics::evaluate(reference, estimate, mask ? &*mask : nullptr);
  report.parameters["reference"] = cfg.reference_path().string();
  report.parameters["estimate"] = cfg.estimate_path().string();
  report.parameters["mask_applied"] = mask.has_value();
  report.parameters["config"] = config_to_json(cfg);

  prepare_out(cfg);
  io::write_report(report, cfg.paths.out / "report.json");
  spdlog::info("evaluate: SAE {:.4f} deg, mean PSNR {}", report.sae_degrees,
               report.psnr_mean_db ? fmt::format("{:.3f} dB", *report.psnr_mean_db)
                                   : std::string("infinite"));
}

void cmd_pipeline(const PipelineConfig& cfg) {
  cmd_simulate(cfg);
  cmd_unmix(cfg);
  cmd_fuse(cfg);
  cmd_evaluate(cfg);
}

}  // namespace hyperfuse::app
