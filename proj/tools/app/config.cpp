#include "app/config.hpp"

#include <set>
#include <string>

#include "hyperfuse/error.hpp"
#include "hyperfuse/random.hpp"

namespace hyperfuse::app {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown(const json& section, const std::set<std::string>& known,
                    const std::string& where) {
  if (!section.is_object()) throw FormatError("config: '" + where + "' must be an object");
  for (const auto& [key, _] : section.items()) {
    if (!known.contains(key)) throw FormatError("config: unknown key '" + where + "." + key + "'");
  }
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::optional<fs::path> optional_path(const json& paths, const char* key, const fs::path& base) {
  if (!paths.contains(key) || paths.at(key).is_null()) return std::nullopt;
  return resolve(paths.at(key).get<std::string>(), base);
}

json optional_path_json(const std::optional<fs::path>& p) {
  return p ? json(p->string()) : json(nullptr);
}

simulate::WavelengthRange range_from(const json& j, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw FormatError(std::string("config: '") + what + "' must be [low, high]");
  return {v[0], v[1]};
}

}  // namespace

unmix::NmfInitMethod init_method_from(const std::string& name) {
  if (name == "random") return unmix::NmfInitMethod::random;
  if (name == "successive_projection") return unmix::NmfInitMethod::successive_projection;
  throw FormatError("config: nmf.init must be 'random' or 'successive_projection', got '" + name +
                    "'");
}

std::string to_string(unmix::NmfInitMethod method) {
  return method == unmix::NmfInitMethod::random ? "random" : "successive_projection";
}

simulate::SimulationConfig PipelineConfig::simulation_config() const {
  simulate::SimulationConfig sim;
  sim.scale = scale;
  sim.snr_db = snr_db;
  sim.pan_range = pan_range;
  sim.class_mapping = class_mapping;
  sim.seed = derive_seed(seed, "noise");
  return sim;
}

unmix::NmfConfig PipelineConfig::nmf_config() const {
  unmix::NmfConfig nmf;
  nmf.endmembers = endmembers.value_or(class_mapping.size());
  nmf.max_iter = nmf_max_iter;
  nmf.tol = nmf_tol;
  nmf.epsilon_guard = epsilon_guard;
  nmf.seed = derive_seed(seed, "nmf");
  nmf.threads = threads;
  nmf.init_method = nmf_init;
  return nmf;
}

fuse::FusionConfig PipelineConfig::fusion_config() const {
  fuse::FusionConfig f;
  f.distinct_delta = distinct_delta;
  f.abundance_threshold = abundance_threshold;
  f.scale = scale;
  f.threads = threads;
  f.fcm.fuzzifier = fuzzifier;
  f.fcm.max_iter = fcm_max_iter;
  f.fcm.tol = fcm_tol;
  f.fcm.seed = derive_seed(seed, "fcm");
  return f;
}

void PipelineConfig::validate() const {
  if (threads < 1) throw DomainError("config: threads must be >= 1");
  if (bands < 1) throw DomainError("config: bands must be >= 1");
  if (wavelength_range && !(wavelength_range->low_nm < wavelength_range->high_nm)) {
    throw DomainError("config: wavelength_range_nm low must be < high");
  }
  simulation_config().validate();
  fusion_config().validate();
  if (nmf_max_iter < 1 || !(nmf_tol > 0) || !(epsilon_guard > 0)) {
    throw DomainError("config: nmf max_iter must be >= 1 and tol, epsilon_guard > 0");
  }
}

PipelineConfig config_from_json(const json& j, const fs::path& base) {
  PipelineConfig cfg;
  try {
    reject_unknown(j, {"seed", "threads", "scale", "paths", "simulation", "nmf", "fcm", "fusion"},
                   "<root>");
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.scale = j.value("scale", cfg.scale);

    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      reject_unknown(p, {"labels", "library", "out", "lowres", "pan", "reference", "estimate", "mask"},
                     "paths");
      if (p.contains("labels")) cfg.paths.labels = resolve(p.at("labels").get<std::string>(), base);
      if (p.contains("library")) cfg.paths.library = resolve(p.at("library").get<std::string>(), base);
      if (p.contains("out")) cfg.paths.out = resolve(p.at("out").get<std::string>(), base);
      cfg.paths.lowres = optional_path(p, "lowres", base);
      cfg.paths.pan = optional_path(p, "pan", base);
      cfg.paths.reference = optional_path(p, "reference", base);
      cfg.paths.estimate = optional_path(p, "estimate", base);
      cfg.paths.mask = optional_path(p, "mask", base);
    }
    if (j.contains("simulation")) {
      const auto& s = j.at("simulation");
      reject_unknown(s, {"snr_db", "pan_range_nm", "bands", "wavelength_range_nm", "class_mapping"},
                     "simulation");
      if (s.contains("snr_db") && !s.at("snr_db").is_null()) cfg.snr_db = s.at("snr_db").get<double>();
      if (s.contains("pan_range_nm")) cfg.pan_range = range_from(s.at("pan_range_nm"), "pan_range_nm");
      cfg.bands = s.value("bands", cfg.bands);
      if (s.contains("wavelength_range_nm") && !s.at("wavelength_range_nm").is_null()) {
        cfg.wavelength_range = range_from(s.at("wavelength_range_nm"), "wavelength_range_nm");
      }
      if (s.contains("class_mapping")) {
        for (const auto& [key, value] : s.at("class_mapping").items()) {
          std::size_t used = 0;
          int id = 0;
          try {
            id = std::stoi(key, &used);
          } catch (const std::exception&) {
            used = 0;
          }
          if (used != key.size()) throw FormatError("config: class id '" + key + "' is not an integer");
          cfg.class_mapping[id] = value.get<std::string>();
        }
      }
    }
    if (j.contains("nmf")) {
      const auto& n = j.at("nmf");
      reject_unknown(n, {"endmembers", "max_iter", "tol", "epsilon_guard", "rescale_to_unit_sum", "init"},
                     "nmf");
      if (n.contains("endmembers") && !n.at("endmembers").is_null()) {
        cfg.endmembers = n.at("endmembers").get<std::size_t>();
      }
      cfg.nmf_max_iter = n.value("max_iter", cfg.nmf_max_iter);
      cfg.nmf_tol = n.value("tol", cfg.nmf_tol);
      cfg.epsilon_guard = n.value("epsilon_guard", cfg.epsilon_guard);
      cfg.rescale_to_unit_sum = n.value("rescale_to_unit_sum", cfg.rescale_to_unit_sum);
      if (n.contains("init")) cfg.nmf_init = init_method_from(n.at("init").get<std::string>());
    }
    if (j.contains("fcm")) {
      const auto& f = j.at("fcm");
      reject_unknown(f, {"fuzzifier", "max_iter", "tol"}, "fcm");
      cfg.fuzzifier = f.value("fuzzifier", cfg.fuzzifier);
      cfg.fcm_max_iter = f.value("max_iter", cfg.fcm_max_iter);
      cfg.fcm_tol = f.value("tol", cfg.fcm_tol);
    }
    if (j.contains("fusion")) {
      const auto& f = j.at("fusion");
      reject_unknown(f, {"distinct_delta", "abundance_threshold"}, "fusion");
      cfg.distinct_delta = f.value("distinct_delta", cfg.distinct_delta);
      cfg.abundance_threshold = f.value("abundance_threshold", cfg.abundance_threshold);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return cfg;
}

json config_to_json(const PipelineConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["scale"] = cfg.scale;
  j["paths"] = {
      {"labels", cfg.paths.labels.string()},
      {"library", cfg.paths.library.string()},
      {"out", cfg.paths.out.string()},
      {"lowres", optional_path_json(cfg.paths.lowres)},
      {"pan", optional_path_json(cfg.paths.pan)},
      {"reference", optional_path_json(cfg.paths.reference)},
      {"estimate", optional_path_json(cfg.paths.estimate)},
      {"mask", optional_path_json(cfg.paths.mask)},
  };
  json mapping = json::object();
  for (const auto& [id, name] : cfg.class_mapping) mapping[std::to_string(id)] = name;
  j["simulation"] = {
      {"snr_db", cfg.snr_db ? json(*cfg.snr_db) : json(nullptr)},
      {"pan_range_nm", {cfg.pan_range.low_nm, cfg.pan_range.high_nm}},
      {"bands", cfg.bands},
      {"wavelength_range_nm",
       cfg.wavelength_range ? json{cfg.wavelength_range->low_nm, cfg.wavelength_range->high_nm}
                            : json(nullptr)},
      {"class_mapping", mapping},
  };
  j["nmf"] = {
      {"endmembers", cfg.endmembers ? json(*cfg.endmembers) : json(nullptr)},
      {"max_iter", cfg.nmf_max_iter},
      {"tol", cfg.nmf_tol},
      {"epsilon_guard", cfg.epsilon_guard},
      {"rescale_to_unit_sum", cfg.rescale_to_unit_sum},
      {"init", to_string(cfg.nmf_init)},
  };
  j["fcm"] = {{"fuzzifier", cfg.fuzzifier}, {"max_iter", cfg.fcm_max_iter}, {"tol", cfg.fcm_tol}};
  j["fusion"] = {{"distinct_delta", cfg.distinct_delta},
                 {"abundance_threshold", cfg.abundance_threshold}};
  return j;
}

}  // namespace hyperfuse::app
