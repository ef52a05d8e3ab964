#include "app/cli.hpp"

#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "app/commands.hpp"
#include "hyperfuse/error.hpp"
#include "hyperfuse/raster_io.hpp"

namespace hyperfuse::app {

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> scale;
  std::optional<std::size_t> endmembers;
  std::optional<double> snr_db;
  std::optional<double> abundance_threshold;
  std::optional<double> distinct_delta;
  std::optional<std::string> out;
  std::optional<std::string> labels;
  std::optional<std::string> library;
  std::optional<std::string> reference;
  std::optional<std::string> estimate;
  std::optional<std::string> mask;
};

void add_common_options(CLI::App& sub, Overrides& o) {
  sub.add_option("--config", o.config, "JSON pipeline configuration");
  sub.add_option("--seed", o.seed, "master seed for noise and initialization");
  sub.add_option("--threads", o.threads, "worker threads (1 = sequential reference mode)");
  sub.add_option("--scale", o.scale, "resolution ratio between PAN and hyperspectral grids");
  sub.add_option("--endmembers", o.endmembers, "number of endmembers P");
  sub.add_option("--snr-db", o.snr_db, "add Gaussian noise at this SNR when simulating");
  sub.add_option("--abundance-threshold", o.abundance_threshold,
                 "minimum abundance for an endmember to count as present");
  sub.add_option("--distinct-delta", o.distinct_delta,
                 "abundance gap below which a matching is resolved spatially");
  sub.add_option("--out", o.out, "output directory");
  sub.add_option("--labels", o.labels, "class label CSV");
  sub.add_option("--library", o.library, "spectral library CSV");
  sub.add_option("--reference", o.reference, "reference cube for evaluate");
  sub.add_option("--estimate", o.estimate, "estimated cube for evaluate");
  sub.add_option("--mask", o.mask, "label CSV; zero-labelled pixels are left out of the metrics");
}

PipelineConfig resolve_config(const Overrides& o) {
  PipelineConfig cfg;
  if (!o.config.empty()) {
    const fs::path path = o.config;
    if (!fs::exists(path)) throw IoError("config file not found: " + path.string());
    cfg = config_from_json(io::read_json(path), fs::absolute(path).parent_path());
  }
  // Flags win over the config file.
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.scale) cfg.scale = *o.scale;
  if (o.endmembers) cfg.endmembers = *o.endmembers;
  if (o.snr_db) cfg.snr_db = *o.snr_db;
  if (o.abundance_threshold) cfg.abundance_threshold = *o.abundance_threshold;
  if (o.distinct_delta) cfg.distinct_delta = *o.distinct_delta;
  if (o.out) cfg.paths.out = *o.out;
  if (o.labels) cfg.paths.labels = *o.labels;
  if (o.library) cfg.paths.library = *o.library;
  if (o.reference) cfg.paths.reference = *o.reference;
  if (o.estimate) cfg.paths.estimate = *o.estimate;
  if (o.mask) cfg.paths.mask = *o.mask;
  return cfg;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("hyperfuse");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("HYPERFUSE_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

}  // namespace

int run_cli(int argc, char** argv) {
  if (!spdlog::get("hyperfuse")) configure_logging();

  CLI::App app{"hyperfuse: hyperspectral / panchromatic fusion from unmixing results"};
  app.require_subcommand(1);
  Overrides overrides;

  const std::map<std::string, std::pair<std::string, std::function<void(const PipelineConfig&)>>>
      commands{
          {"simulate", {"generate HR cube, low-resolution cube and PAN from labels", cmd_simulate}},
          {"unmix", {"NMF unmixing of the low-resolution cube", cmd_unmix}},
          {"fuse", {"fuse unmixing results with PAN segmentation", cmd_fuse}},
          {"evaluate", {"SAE / PSNR report of an estimate against a reference", cmd_evaluate}},
          {"pipeline", {"simulate, unmix, fuse and evaluate in sequence", cmd_pipeline}},
      };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) {
    subs[name] = app.add_subcommand(name, entry.first);
    add_common_options(*subs[name], overrides);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      const auto cfg = resolve_config(overrides);
      commands.at(name).second(cfg);
      return 0;
    } catch (const Error& e) {
      spdlog::error("{}: {}", name, e.what());
      return exit_code(e.kind());
    } catch (const std::exception& e) {
      spdlog::error("{}: {}", name, e.what());
      return 2;
    }
  }
  return 2;
}

}  // namespace hyperfuse::app
