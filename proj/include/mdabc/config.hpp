#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdabc/errors.hpp"
#include "mdabc/experiments.hpp"
#include "mdabc/models.hpp"

namespace mdabc {

// Experiment configuration files are versioned JSON.  Parsing is strict:
// unknown keys, wrong types, and structurally impossible requests are all
// ConfigError, raised before any computation starts.
inline constexpr int kConfigSchemaVersion = 1;

// A parsed configuration: the experiment to run plus which study shape the
// file asked for (repeated sampling vs contamination sweep).
struct RunPlan {
  ExperimentConfig experiment;
  bool sweep = false;
};

namespace detail {

inline void require_known_keys(const json& j,
                               std::initializer_list<const char*> allowed,
                               const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (item.key() == a) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
  }
}

template <class T>
T config_get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": key \"" + key + "\" has the wrong type");
  }
}

template <class T>
T config_get_or(const json& j, const char* key, const std::string& where,
                T fallback) {
  if (!j.contains(key)) return fallback;
  return config_get<T>(j, key, where);
}

inline std::optional<ContaminationSpec> contamination_from_config(const json& jm) {
  if (!jm.contains("contamination")) return std::nullopt;
  const json& jc = jm.at("contamination");
  require_known_keys(jc, {"alpha", "zeta", "nu"}, "config.model.contamination");
  ContaminationSpec spec;
  spec.alpha = config_get_or(jc, "alpha", "config.model.contamination", spec.alpha);
  spec.zeta = config_get_or(jc, "zeta", "config.model.contamination", spec.zeta);
  spec.nu = config_get_or(jc, "nu", "config.model.contamination", spec.nu);
  return spec;
}

inline ModelSpec model_from_config(const json& jm) {
  require_known_keys(jm, {"name", "n_obs", "burn_in", "contamination"},
                     "config.model");
  const auto name = config_get<std::string>(jm, "name", "config.model");
  const auto n_obs = config_get<std::size_t>(jm, "n_obs", "config.model");
  if (n_obs == 0) throw ConfigError("config.model: n_obs must be positive");

  ModelName model_name;
  try {
    model_name = model_name_from_string(name);
  } catch (const std::invalid_argument&) {
    throw ConfigError("config.model: unknown model \"" + name + "\"");
  }

  const bool takes_contamination =
      model_name == ModelName::mixture || model_name == ModelName::sv;
  if (jm.contains("contamination") && !takes_contamination) {
    throw ConfigError("config.model: model \"" + name +
                      "\" does not take contamination");
  }
  if (jm.contains("burn_in") && model_name != ModelName::sv) {
    throw ConfigError("config.model: only the volatility model takes burn_in");
  }

  switch (model_name) {
    case ModelName::mixture:
      return ModelSpec::mixture(n_obs, n_obs, contamination_from_config(jm));
    case ModelName::gk:
      return ModelSpec::gk(n_obs, n_obs);
    case ModelName::mg1:
      return ModelSpec::mg1(n_obs, n_obs);
    case ModelName::sv:
      return ModelSpec::sv(n_obs, n_obs,
                           config_get_or<std::size_t>(jm, "burn_in",
                                                      "config.model", 500),
                           contamination_from_config(jm));
  }
  throw ConfigError("config.model: unknown model \"" + name + "\"");
}

inline DistanceKind distance_kind_from_config(const json& jm,
                                              const std::string& where) {
  const auto name = config_get<std::string>(jm, "distance", where);
  if (name == "cvm") return DistanceKind::cvm();
  if (name == "hellinger") return DistanceKind::hellinger();
  if (name == "wasserstein") {
    return DistanceKind::wasserstein(config_get_or(jm, "p", where, 1.0));
  }
  throw ConfigError(where + ": unknown distance \"" + name + "\"");
}

inline MethodSpec method_from_config(const json& jm, std::size_t index) {
  const std::string where = "config.methods[" + std::to_string(index) + "]";
  require_known_keys(jm, {"label", "distance", "m_sim", "p"}, where);
  MethodSpec method;
  method.label = config_get<std::string>(jm, "label", where);
  method.kind = distance_kind_from_config(jm, where);
  if (jm.contains("p") && method.kind.family != DistanceKind::Family::wasserstein) {
    throw ConfigError(where + ": p applies to the wasserstein distance only");
  }
  method.m_sim = config_get<std::size_t>(jm, "m_sim", where);
  return method;
}

inline SmcConfig sampler_from_config(const json& js) {
  require_known_keys(js,
                     {"n_particles", "sim_budget", "alpha_quantile",
                      "ess_threshold_fraction", "move_steps", "rw_scale"},
                     "config.sampler");
  SmcConfig cfg;
  cfg.n_particles =
      config_get_or(js, "n_particles", "config.sampler", cfg.n_particles);
  cfg.sim_budget = config_get<std::size_t>(js, "sim_budget", "config.sampler");
  cfg.alpha_quantile =
      config_get_or(js, "alpha_quantile", "config.sampler", cfg.alpha_quantile);
  cfg.ess_threshold_fraction = config_get_or(js, "ess_threshold_fraction",
                                             "config.sampler",
                                             cfg.ess_threshold_fraction);
  cfg.move_steps = config_get_or(js, "move_steps", "config.sampler", cfg.move_steps);
  cfg.rw_scale = config_get_or(js, "rw_scale", "config.sampler", cfg.rw_scale);
  return cfg;
}

inline std::vector<double> zeta_grid_from_config(const json& jz) {
  if (jz.is_array()) {
    std::vector<double> grid;
    for (const auto& v : jz) {
      if (!v.is_number()) throw ConfigError("config.zeta_grid: entries must be numbers");
      grid.push_back(v.get<double>());
    }
    if (grid.empty()) throw ConfigError("config.zeta_grid: grid is empty");
    return grid;
  }
  require_known_keys(jz, {"from", "to", "step"}, "config.zeta_grid");
  const double from = config_get<double>(jz, "from", "config.zeta_grid");
  const double to = config_get<double>(jz, "to", "config.zeta_grid");
  const double step = config_get<double>(jz, "step", "config.zeta_grid");
  if (!(step > 0.0)) throw ConfigError("config.zeta_grid: step must be positive");
  if (to < from) throw ConfigError("config.zeta_grid: to is below from");
  std::vector<double> grid;
  for (double z = from; z <= to + 1e-9 * step; z += step) grid.push_back(z);
  return grid;
}

}  // namespace detail

inline RunPlan parse_run_plan(const detail::json& j) {
  detail::require_known_keys(j,
                             {"schema_version", "experiment", "model", "theta_true",
                              "methods", "sampler", "n_replications", "master_seed",
                              "zeta_grid"},
                             "config");
  if (detail::config_get<int>(j, "schema_version", "config") != kConfigSchemaVersion) {
    throw ConfigError("config: unsupported schema_version");
  }
  const auto kind =
      detail::config_get_or<std::string>(j, "experiment", "config", "replications");
  if (kind != "replications" && kind != "sweep") {
    throw ConfigError("config: experiment must be \"replications\" or \"sweep\"");
  }

  RunPlan plan;
  plan.sweep = (kind == "sweep");
  plan.experiment.model = detail::model_from_config(
      detail::config_get<detail::json>(j, "model", "config"));
  plan.experiment.theta_true =
      detail::config_get<ParameterVector>(j, "theta_true", "config");

  const auto jmethods = detail::config_get<detail::json>(j, "methods", "config");
  if (!jmethods.is_array() || jmethods.empty()) {
    throw ConfigError("config: methods must be a non-empty array");
  }
  for (std::size_t i = 0; i < jmethods.size(); ++i) {
    plan.experiment.methods.push_back(detail::method_from_config(jmethods[i], i));
  }

  plan.experiment.sampler = detail::sampler_from_config(
      detail::config_get<detail::json>(j, "sampler", "config"));
  plan.experiment.master_seed =
      detail::config_get_or<std::uint64_t>(j, "master_seed", "config", 1);

  if (plan.sweep) {
    if (j.contains("n_replications")) {
      throw ConfigError("config: sweeps run one dataset per grid point; "
                        "n_replications does not apply");
    }
    if (!j.contains("zeta_grid")) {
      throw ConfigError("config: experiment \"sweep\" requires zeta_grid");
    }
    plan.experiment.zeta_grid = detail::zeta_grid_from_config(j.at("zeta_grid"));
  } else {
    if (j.contains("zeta_grid")) {
      throw ConfigError("config: zeta_grid requires experiment \"sweep\"");
    }
    plan.experiment.n_replications =
        detail::config_get_or<std::size_t>(j, "n_replications", "config", 1);
  }
  return plan;
}

// The sidecar written next to every report: the fully resolved plan (flag
// overrides applied) in the same schema the loader accepts, so a run can be
// replayed from its own output directory.
inline detail::json run_plan_to_json(const RunPlan& plan) {
  detail::json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["experiment"] = plan.sweep ? "sweep" : "replications";

  detail::json jm;
  jm["name"] = model_name_string(plan.experiment.model.name);
  jm["n_obs"] = plan.experiment.model.n_obs;
  if (plan.experiment.model.name == ModelName::sv) {
    jm["burn_in"] = plan.experiment.model.burn_in;
  }
  if (plan.experiment.model.contamination) {
    const auto& c = *plan.experiment.model.contamination;
    jm["contamination"] = detail::json{{"alpha", c.alpha}, {"zeta", c.zeta}, {"nu", c.nu}};
  }
  j["model"] = jm;
  j["theta_true"] = plan.experiment.theta_true;

  j["methods"] = detail::json::array();
  for (const auto& m : plan.experiment.methods) {
    detail::json jme;
    jme["label"] = m.label;
    switch (m.kind.family) {
      case DistanceKind::Family::wasserstein:
        jme["distance"] = "wasserstein";
        jme["p"] = m.kind.p;
        break;
      case DistanceKind::Family::cvm:
        jme["distance"] = "cvm";
        break;
      case DistanceKind::Family::hellinger:
        jme["distance"] = "hellinger";
        break;
    }
    jme["m_sim"] = m.m_sim;
    j["methods"].push_back(jme);
  }

  const auto& s = plan.experiment.sampler;
  j["sampler"] = detail::json{{"n_particles", s.n_particles},
                              {"sim_budget", s.sim_budget},
                              {"alpha_quantile", s.alpha_quantile},
                              {"ess_threshold_fraction", s.ess_threshold_fraction},
                              {"move_steps", s.move_steps},
                              {"rw_scale", s.rw_scale}};
  j["master_seed"] = plan.experiment.master_seed;
  if (plan.sweep) {
    j["zeta_grid"] = *plan.experiment.zeta_grid;
  } else {
    j["n_replications"] = plan.experiment.n_replications;
  }
  return j;
}

inline RunPlan load_run_plan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open config: " + path);
  detail::json j;
  try {
    in >> j;
  } catch (const detail::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_run_plan(j);
}

}  // namespace mdabc
