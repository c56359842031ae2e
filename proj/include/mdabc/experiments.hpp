#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdabc/abc.hpp"
#include "mdabc/distances.hpp"
#include "mdabc/errors.hpp"
#include "mdabc/estimators.hpp"
#include "mdabc/io.hpp"
#include "mdabc/models.hpp"
#include "mdabc/parallel.hpp"
#include "mdabc/priors.hpp"
#include "mdabc/rng.hpp"

namespace mdabc {

// One inference method entering a comparison: a display label, the distance
// it thresholds, and how many draws each simulated dataset contains.
struct MethodSpec {
  std::string label;
  DistanceKind kind;
  std::size_t m_sim = 0;
};

// A full repeated-sampling study: which model generates the data, which
// methods compete on it, the sampler settings shared by all of them, and the
// seeding that makes every number replayable.
struct ExperimentConfig {
  ModelSpec model;
  std::vector<MethodSpec> methods;
  SmcConfig sampler;
  std::size_t n_replications = 1;
  ParameterVector theta_true;
  std::uint64_t master_seed = 1;
  std::optional<std::vector<double>> zeta_grid;
  unsigned threads = 1;
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.methods.empty()) throw InvalidParameter("experiment needs at least one method");
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    if (cfg.methods[i].label.empty()) throw InvalidParameter("method label is empty");
    if (cfg.methods[i].m_sim == 0) {
      throw InvalidParameter("method " + cfg.methods[i].label +
                             " has zero simulated draws");
    }
    for (std::size_t j = i + 1; j < cfg.methods.size(); ++j) {
      if (cfg.methods[i].label == cfg.methods[j].label) {
        throw InvalidParameter("duplicate method label: " + cfg.methods[i].label);
      }
    }
  }
  if (cfg.n_replications == 0) throw InvalidParameter("need at least one replication");
  if (cfg.theta_true.size() != cfg.model.prior.dimension()) {
    throw DimensionMismatch("theta_true does not match the model's parameter space");
  }
  if (!prior_supports(cfg.model.prior, cfg.theta_true)) {
    throw InvalidParameter("theta_true lies outside the prior support");
  }
  if (cfg.zeta_grid) {
    if (cfg.zeta_grid->empty()) throw InvalidParameter("zeta grid is empty");
    if (!cfg.model.contamination) {
      throw InvalidParameter("zeta sweep requires a contamination setup");
    }
  }
  if (cfg.threads == 0) throw InvalidParameter("thread count must be positive");
  validate(cfg.sampler);
}

inline bool operator==(const PosteriorSummary& a, const PosteriorSummary& b) {
  return a.mean == b.mean && a.std == b.std && a.ci_low == b.ci_low &&
         a.ci_high == b.ci_high;
}

// Outcome of one method on one dataset.  Failed runs carry the error text and
// empty numeric fields so reports stay free of NaN/infinity.
struct MethodRun {
  bool success = false;
  std::string error;
  PosteriorSummary summary;
  double final_epsilon = 0.0;
  std::size_t total_simulations = 0;
  std::vector<double> epsilon_trace;

  friend bool operator==(const MethodRun&, const MethodRun&) = default;
};

struct ReplicationRecord {
  std::size_t replication = 0;
  std::uint64_t dataset_hash = 0;
  std::vector<MethodRun> runs;  // indexed like ExperimentConfig::methods

  friend bool operator==(const ReplicationRecord&, const ReplicationRecord&) = default;
};

// Repeated-sampling aggregate for one method, per coordinate.  `valid` is set
// when at least 90% of the replications succeeded; aggregates average over
// the successful ones.
struct MethodAggregate {
  std::string label;
  bool valid = false;
  std::size_t successes = 0;
  ParameterVector overall_mean;
  ParameterVector avg_posterior_std;
  ParameterVector coverage_pct;
  ParameterVector rmse;

  friend bool operator==(const MethodAggregate&, const MethodAggregate&) = default;
};

struct ExperimentReport {
  std::uint64_t master_seed = 0;
  ParameterVector theta_true;
  std::vector<std::string> coordinate_names;
  std::vector<std::string> method_labels;
  std::vector<ReplicationRecord> replications;
  std::vector<MethodAggregate> aggregates;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

// One grid point of a contamination sweep: the intruder location and every
// method's posterior on the dataset generated with it.
struct SweepPoint {
  double zeta = 0.0;
  std::uint64_t dataset_hash = 0;
  std::vector<MethodRun> runs;

  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepReport {
  std::uint64_t master_seed = 0;
  ParameterVector theta_true;
  std::vector<std::string> coordinate_names;
  std::vector<std::string> method_labels;
  std::vector<SweepPoint> points;

  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

// Sampler entry point, injectable so plumbing tests can substitute stubs for
// the real sequential sampler.
using SamplerFn = std::function<ParticleCloud(
    const ModelSpec&, const DistanceContext&, const SmcConfig&, const SamplerRun&)>;

inline SamplerFn default_sampler() {
  return [](const ModelSpec& spec, const DistanceContext& ctx, const SmcConfig& cfg,
            const SamplerRun& run) { return smc_abc(spec, ctx, cfg, run); };
}

namespace detail {

// Observed datasets draw from this unit so they can never collide with the
// sampler's particle, move, or resampling streams.
constexpr std::uint64_t kExperimentObservedUnit = 1ull << 62;

inline std::uint64_t fnv1a_hash(const std::vector<double>& values) {
  std::uint64_t h = 1469598103934665603ull;
  for (double v : values) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFFull;
      h *= 1099511628211ull;
    }
  }
  return h;
}

inline std::vector<std::string> coordinate_names(const ModelSpec& model) {
  std::vector<std::string> names;
  names.reserve(model.prior.coords.size());
  for (const auto& c : model.prior.coords) names.push_back(c.name);
  return names;
}

// Runs every method on one dataset; the per-method clouds are folded to the
// model's canonical labeling before summarizing.  The dataset hash is
// re-checked after every method so a mutation bug cannot silently bias a
// comparison.
inline std::vector<MethodRun> run_methods_on_dataset(
    const ExperimentConfig& cfg, const Dataset& observed, std::uint64_t hash,
    std::uint64_t first_run_id, unsigned sampler_threads, const SamplerFn& sampler) {
  std::vector<MethodRun> runs(cfg.methods.size());
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    MethodRun& out = runs[m];
    try {
      ModelSpec method_model = cfg.model;
      method_model.m_sim = cfg.methods[m].m_sim;
      DistanceContext ctx(cfg.methods[m].kind, observed);
      const SamplerRun run{cfg.master_seed, first_run_id + m, sampler_threads};
      auto cloud = sampler(method_model, ctx, cfg.sampler, run);
      if (fnv1a_hash(observed.values) != hash) {
        throw IoFailure("observed dataset changed while a method ran");
      }
      cloud = canonicalize_for_model(std::move(cloud), cfg.model.name);
      out.summary = summarize(cloud);
      out.final_epsilon = cloud.epsilon;
      out.total_simulations = cloud.total_simulations;
      out.epsilon_trace = cloud.epsilon_trace;
      out.success = true;
    } catch (const std::exception& e) {
      out.success = false;
      out.error = e.what();
      out.summary = PosteriorSummary{};
      out.final_epsilon = 0.0;
      out.total_simulations = 0;
      out.epsilon_trace.clear();
    }
  }
  return runs;
}

inline MethodAggregate aggregate_method(const ExperimentConfig& cfg, std::size_t m,
                                        const std::vector<ReplicationRecord>& reps) {
  MethodAggregate agg;
  agg.label = cfg.methods[m].label;
  const std::size_t d = cfg.theta_true.size();
  agg.overall_mean.assign(d, 0.0);
  agg.avg_posterior_std.assign(d, 0.0);
  agg.coverage_pct.assign(d, 0.0);
  agg.rmse.assign(d, 0.0);

  std::size_t s = 0;
  for (const auto& rec : reps) {
    if (rec.runs[m].success) ++s;
  }
  agg.successes = s;
  agg.valid = s * 10 >= reps.size() * 9;
  if (s == 0) return agg;

  for (const auto& rec : reps) {
    const auto& run = rec.runs[m];
    if (!run.success) continue;
    for (std::size_t j = 0; j < d; ++j) {
      agg.overall_mean[j] += run.summary.mean[j];
      agg.avg_posterior_std[j] += run.summary.std[j];
      if (run.summary.ci_low[j] <= cfg.theta_true[j] &&
          cfg.theta_true[j] <= run.summary.ci_high[j]) {
        agg.coverage_pct[j] += 1.0;
      }
      const double err = run.summary.mean[j] - cfg.theta_true[j];
      agg.rmse[j] += err * err;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double n = static_cast<double>(s);
    agg.overall_mean[j] /= n;
    agg.avg_posterior_std[j] /= n;
    agg.coverage_pct[j] *= 100.0 / n;
    agg.rmse[j] = std::sqrt(agg.rmse[j] / n);
  }
  return agg;
}

}  // namespace detail

// Repeated-sampling study: replication r generates one observed dataset from
// theta_true (stream (master_seed, r, observed-unit, 0)) and every method
// runs on that same dataset.  Replications spread across threads; the
// sampler's own determinism makes the outcome independent of the split.
inline ExperimentReport run_replications(const ExperimentConfig& cfg,
                                         const SamplerFn& sampler = default_sampler()) {
  validate(cfg);

  ExperimentReport report;
  report.master_seed = cfg.master_seed;
  report.theta_true = cfg.theta_true;
  report.coordinate_names = detail::coordinate_names(cfg.model);
  for (const auto& m : cfg.methods) report.method_labels.push_back(m.label);
  report.replications.assign(cfg.n_replications, ReplicationRecord{});

  const unsigned outer = std::min<unsigned>(
      cfg.threads, static_cast<unsigned>(cfg.n_replications));
  const unsigned inner = std::max(1u, cfg.threads / std::max(1u, outer));

  parallel_for(cfg.n_replications, outer, [&](std::size_t r) {
    RngStream obs_rng(cfg.master_seed, r, detail::kExperimentObservedUnit, 0);
    const Dataset observed = generate_observed(cfg.model, cfg.theta_true, obs_rng);
    ReplicationRecord rec;
    rec.replication = r;
    rec.dataset_hash = detail::fnv1a_hash(observed.values);
    rec.runs = detail::run_methods_on_dataset(
        cfg, observed, rec.dataset_hash, r * cfg.methods.size(), inner, sampler);
    report.replications[r] = std::move(rec);
  });

  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    report.aggregates.push_back(detail::aggregate_method(cfg, m, report.replications));
  }
  return report;
}

// Contamination sweep: one observed dataset per grid value of the intruder
// location (stream (master_seed, grid-index, observed-unit, 0)), each method
// summarized on it.  Emits curve data, not repeated-sampling aggregates.
inline SweepReport run_zeta_sweep(const ExperimentConfig& cfg,
                                  const SamplerFn& sampler = default_sampler()) {
  validate(cfg);
  if (!cfg.zeta_grid) throw InvalidParameter("sweep requires a zeta grid");

  SweepReport report;
  report.master_seed = cfg.master_seed;
  report.theta_true = cfg.theta_true;
  report.coordinate_names = detail::coordinate_names(cfg.model);
  for (const auto& m : cfg.methods) report.method_labels.push_back(m.label);
  const auto& grid = *cfg.zeta_grid;
  report.points.assign(grid.size(), SweepPoint{});

  const unsigned outer =
      std::min<unsigned>(cfg.threads, static_cast<unsigned>(grid.size()));
  const unsigned inner = std::max(1u, cfg.threads / std::max(1u, outer));

  parallel_for(grid.size(), outer, [&](std::size_t k) {
    ExperimentConfig point_cfg = cfg;
    point_cfg.model.contamination->zeta = grid[k];
    RngStream obs_rng(cfg.master_seed, k, detail::kExperimentObservedUnit, 0);
    const Dataset observed =
        generate_observed(point_cfg.model, cfg.theta_true, obs_rng);
    SweepPoint point;
    point.zeta = grid[k];
    point.dataset_hash = detail::fnv1a_hash(observed.values);
    point.runs = detail::run_methods_on_dataset(
        point_cfg, observed, point.dataset_hash, k * cfg.methods.size(), inner,
        sampler);
    report.points[k] = std::move(point);
  });

  return report;
}

// ---------------------------------------------------------------------------
// Report persistence.  CSV files hold the table- and curve-shaped views;
// the JSON sidecar holds the complete report (seed included) for exact
// replay and round-tripping.

enum class ReportFormat { csv, json };

namespace detail {

using nlohmann::json;

inline json summary_to_json(const PosteriorSummary& s) {
  return json{{"mean", s.mean},
              {"std", s.std},
              {"ci_low", s.ci_low},
              {"ci_high", s.ci_high}};
}

inline PosteriorSummary summary_from_json(const json& j) {
  PosteriorSummary s;
  s.mean = j.at("mean").get<ParameterVector>();
  s.std = j.at("std").get<ParameterVector>();
  s.ci_low = j.at("ci_low").get<ParameterVector>();
  s.ci_high = j.at("ci_high").get<ParameterVector>();
  return s;
}

inline json method_run_to_json(const MethodRun& r) {
  return json{{"success", r.success},
              {"error", r.error},
              {"summary", summary_to_json(r.summary)},
              {"final_epsilon", r.final_epsilon},
              {"total_simulations", r.total_simulations},
              {"epsilon_trace", r.epsilon_trace}};
}

inline MethodRun method_run_from_json(const json& j) {
  MethodRun r;
  r.success = j.at("success").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.summary = summary_from_json(j.at("summary"));
  r.final_epsilon = j.at("final_epsilon").get<double>();
  r.total_simulations = j.at("total_simulations").get<std::size_t>();
  r.epsilon_trace = j.at("epsilon_trace").get<std::vector<double>>();
  return r;
}

inline json aggregate_to_json(const MethodAggregate& a) {
  return json{{"label", a.label},
              {"valid", a.valid},
              {"successes", a.successes},
              {"overall_mean", a.overall_mean},
              {"avg_posterior_std", a.avg_posterior_std},
              {"coverage_pct", a.coverage_pct},
              {"rmse", a.rmse}};
}

inline MethodAggregate aggregate_from_json(const json& j) {
  MethodAggregate a;
  a.label = j.at("label").get<std::string>();
  a.valid = j.at("valid").get<bool>();
  a.successes = j.at("successes").get<std::size_t>();
  a.overall_mean = j.at("overall_mean").get<ParameterVector>();
  a.avg_posterior_std = j.at("avg_posterior_std").get<ParameterVector>();
  a.coverage_pct = j.at("coverage_pct").get<ParameterVector>();
  a.rmse = j.at("rmse").get<ParameterVector>();
  return a;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoFailure("write failed: " + path.string());
}

// One aggregate table (methods x coordinates) as CSV.
inline std::string aggregate_table_csv(const std::vector<std::string>& coord_names,
                                       const std::vector<MethodAggregate>& aggs,
                                       ParameterVector MethodAggregate::*field) {
  std::string text = "method";
  for (const auto& c : coord_names) text += "," + c;
  text += "\n";
  for (const auto& a : aggs) {
    text += a.label;
    for (double v : a.*field) text += "," + format_double(v);
    text += "\n";
  }
  return text;
}

inline std::string method_run_row(const MethodRun& run, std::size_t d) {
  std::string text;
  text += run.success ? "1" : "0";
  for (std::size_t j = 0; j < d; ++j) {
    text += "," + (run.success ? format_double(run.summary.mean[j]) : std::string());
  }
  for (std::size_t j = 0; j < d; ++j) {
    text += "," + (run.success ? format_double(run.summary.std[j]) : std::string());
  }
  for (std::size_t j = 0; j < d; ++j) {
    text += "," + (run.success ? format_double(run.summary.ci_low[j]) : std::string());
  }
  for (std::size_t j = 0; j < d; ++j) {
    text += "," + (run.success ? format_double(run.summary.ci_high[j]) : std::string());
  }
  text += "," + (run.success ? format_double(run.final_epsilon) : std::string());
  text += "," + std::to_string(run.total_simulations);
  return text;
}

inline std::string method_run_header(const std::vector<std::string>& coord_names) {
  std::string text = "success";
  for (const auto& c : coord_names) text += ",mean_" + c;
  for (const auto& c : coord_names) text += ",std_" + c;
  for (const auto& c : coord_names) text += ",ci_low_" + c;
  for (const auto& c : coord_names) text += ",ci_high_" + c;
  text += ",final_epsilon,total_simulations";
  return text;
}

}  // namespace detail

// Writes a repeated-sampling report.  csv: means.csv, std.csv, cov.csv,
// rmse.csv (aggregate tables) and replications.csv (raw per-replication
// rows).  json: report.json, the complete report for replay/round-trip.
inline void emit_report(const ExperimentReport& report, ReportFormat format,
                        const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoFailure("cannot create directory: " + directory);

  if (format == ReportFormat::csv) {
    detail::write_text_file(
        fs::path(directory) / "means.csv",
        detail::aggregate_table_csv(report.coordinate_names, report.aggregates,
                                    &MethodAggregate::overall_mean));
    detail::write_text_file(
        fs::path(directory) / "std.csv",
        detail::aggregate_table_csv(report.coordinate_names, report.aggregates,
                                    &MethodAggregate::avg_posterior_std));
    detail::write_text_file(
        fs::path(directory) / "cov.csv",
        detail::aggregate_table_csv(report.coordinate_names, report.aggregates,
                                    &MethodAggregate::coverage_pct));
    detail::write_text_file(
        fs::path(directory) / "rmse.csv",
        detail::aggregate_table_csv(report.coordinate_names, report.aggregates,
                                    &MethodAggregate::rmse));

    std::string rows = "replication,method," +
                       detail::method_run_header(report.coordinate_names) +
                       ",dataset_hash\n";
    for (const auto& rec : report.replications) {
      for (std::size_t m = 0; m < rec.runs.size(); ++m) {
        rows += std::to_string(rec.replication) + "," + report.method_labels[m] +
                "," +
                detail::method_run_row(rec.runs[m], report.coordinate_names.size()) +
                "," + std::to_string(rec.dataset_hash) + "\n";
      }
    }
    detail::write_text_file(fs::path(directory) / "replications.csv", rows);
    return;
  }

  detail::json j;
  j["schema_version"] = 1;
  j["kind"] = "replications";
  j["master_seed"] = report.master_seed;
  j["theta_true"] = report.theta_true;
  j["coordinate_names"] = report.coordinate_names;
  j["method_labels"] = report.method_labels;
  j["replications"] = detail::json::array();
  for (const auto& rec : report.replications) {
    detail::json runs = detail::json::array();
    for (const auto& run : rec.runs) runs.push_back(detail::method_run_to_json(run));
    j["replications"].push_back(detail::json{{"replication", rec.replication},
                                             {"dataset_hash", rec.dataset_hash},
                                             {"runs", runs}});
  }
  j["aggregates"] = detail::json::array();
  for (const auto& a : report.aggregates) {
    j["aggregates"].push_back(detail::aggregate_to_json(a));
  }
  detail::write_text_file(fs::path(directory) / "report.json", j.dump(2) + "\n");
}

// Writes a sweep report.  csv: sweep.csv, one row per (zeta, method).
// json: report.json as above.
inline void emit_report(const SweepReport& report, ReportFormat format,
                        const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoFailure("cannot create directory: " + directory);

  if (format == ReportFormat::csv) {
    std::string rows = "zeta,method," +
                       detail::method_run_header(report.coordinate_names) +
                       ",dataset_hash\n";
    for (const auto& point : report.points) {
      for (std::size_t m = 0; m < point.runs.size(); ++m) {
        rows += detail::format_double(point.zeta) + "," + report.method_labels[m] +
                "," +
                detail::method_run_row(point.runs[m], report.coordinate_names.size()) +
                "," + std::to_string(point.dataset_hash) + "\n";
      }
    }
    detail::write_text_file(fs::path(directory) / "sweep.csv", rows);
    return;
  }

  detail::json j;
  j["schema_version"] = 1;
  j["kind"] = "sweep";
  j["master_seed"] = report.master_seed;
  j["theta_true"] = report.theta_true;
  j["coordinate_names"] = report.coordinate_names;
  j["method_labels"] = report.method_labels;
  j["points"] = detail::json::array();
  for (const auto& point : report.points) {
    detail::json runs = detail::json::array();
    for (const auto& run : point.runs) runs.push_back(detail::method_run_to_json(run));
    j["points"].push_back(detail::json{{"zeta", point.zeta},
                                       {"dataset_hash", point.dataset_hash},
                                       {"runs", runs}});
  }
  detail::write_text_file(fs::path(directory) / "report.json", j.dump(2) + "\n");
}

namespace detail {

inline json load_report_json(const std::string& directory, const char* expected_kind) {
  const auto path = std::filesystem::path(directory) / "report.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open for reading: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoFailure(path.string() + ": " + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != 1) {
      throw IoFailure(path.string() + ": unsupported schema version");
    }
    if (j.at("kind").get<std::string>() != expected_kind) {
      throw IoFailure(path.string() + ": report kind is not \"" +
                      expected_kind + "\"");
    }
  } catch (const json::exception& e) {
    throw IoFailure(path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace detail

inline ExperimentReport parse_replication_report(const std::string& directory) {
  const auto j = detail::load_report_json(directory, "replications");
  ExperimentReport report;
  try {
    report.master_seed = j.at("master_seed").get<std::uint64_t>();
    report.theta_true = j.at("theta_true").get<ParameterVector>();
    report.coordinate_names = j.at("coordinate_names").get<std::vector<std::string>>();
    report.method_labels = j.at("method_labels").get<std::vector<std::string>>();
    for (const auto& rj : j.at("replications")) {
      ReplicationRecord rec;
      rec.replication = rj.at("replication").get<std::size_t>();
      rec.dataset_hash = rj.at("dataset_hash").get<std::uint64_t>();
      for (const auto& runj : rj.at("runs")) {
        rec.runs.push_back(detail::method_run_from_json(runj));
      }
      report.replications.push_back(std::move(rec));
    }
    for (const auto& aj : j.at("aggregates")) {
      report.aggregates.push_back(detail::aggregate_from_json(aj));
    }
  } catch (const detail::json::exception& e) {
    throw IoFailure(std::string("report.json: ") + e.what());
  }
  return report;
}

inline SweepReport parse_sweep_report(const std::string& directory) {
  const auto j = detail::load_report_json(directory, "sweep");
  SweepReport report;
  try {
    report.master_seed = j.at("master_seed").get<std::uint64_t>();
    report.theta_true = j.at("theta_true").get<ParameterVector>();
    report.coordinate_names = j.at("coordinate_names").get<std::vector<std::string>>();
    report.method_labels = j.at("method_labels").get<std::vector<std::string>>();
    for (const auto& pj : j.at("points")) {
      SweepPoint point;
      point.zeta = pj.at("zeta").get<double>();
      point.dataset_hash = pj.at("dataset_hash").get<std::uint64_t>();
      for (const auto& runj : pj.at("runs")) {
        point.runs.push_back(detail::method_run_from_json(runj));
      }
      report.points.push_back(std::move(point));
    }
  } catch (const detail::json::exception& e) {
    throw IoFailure(std::string("report.json: ") + e.what());
  }
  return report;
}

}  // namespace mdabc
