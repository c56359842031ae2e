// Command-line front end: run experiments from config files, compute single
// distances between datasets, simulate datasets, and print the version.
//
// Exit codes: 0 success; 2 validation error (bad flags, unreadable or
// malformed inputs, parameters outside the model's support); 1 runtime error.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdabc/config.hpp"
#include "mdabc/distances.hpp"
#include "mdabc/errors.hpp"
#include "mdabc/experiments.hpp"
#include "mdabc/io.hpp"
#include "mdabc/models.hpp"
#include "mdabc/parallel.hpp"
#include "mdabc/rng.hpp"
#include "mdabc/version.hpp"

namespace {

struct GlobalFlags {
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out = "out";
  unsigned threads = mdabc::hardware_threads();
  bool quiet = false;
};

void fail(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
}

template <class Body>
int guarded(Body body) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
    return 2;
  } catch (const std::exception& e) {
    fail(e.what());
    return 1;
  }
}

mdabc::ParameterVector parse_theta(const std::string& text) {
  mdabc::ParameterVector theta;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string token = text.substr(start, end - start);
    char* parsed_end = nullptr;
    const double v = std::strtod(token.c_str(), &parsed_end);
    if (token.empty() || parsed_end != token.c_str() + token.size() ||
        !std::isfinite(v)) {
      throw mdabc::InvalidParameter("cannot parse theta component \"" + token + "\"");
    }
    theta.push_back(v);
    start = end + 1;
  }
  return theta;
}

int cmd_run(const GlobalFlags& flags, const std::string& config_path,
            std::uint64_t n_replications_override, std::uint64_t sim_budget_override) {
  mdabc::RunPlan plan;
  try {
    plan = mdabc::load_run_plan(config_path);
  } catch (const mdabc::IoFailure& e) {
    fail(e.what());
    return 2;
  }
  if (flags.seed_given) plan.experiment.master_seed = flags.seed;
  if (n_replications_override > 0) {
    if (plan.sweep) {
      throw mdabc::InvalidParameter(
          "--n-replications does not apply to a sweep config");
    }
    plan.experiment.n_replications = n_replications_override;
  }
  if (sim_budget_override > 0) plan.experiment.sampler.sim_budget = sim_budget_override;
  plan.experiment.threads = flags.threads;
  mdabc::validate(plan.experiment);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(flags.out, ec);
  if (ec) throw mdabc::IoFailure("cannot create directory: " + flags.out);
  mdabc::detail::write_text_file(fs::path(flags.out) / "config.json",
                                 mdabc::run_plan_to_json(plan).dump(2) + "\n");

  const auto t0 = std::chrono::steady_clock::now();
  if (plan.sweep) {
    const auto report = mdabc::run_zeta_sweep(plan.experiment);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    mdabc::emit_report(report, mdabc::ReportFormat::csv, flags.out);
    mdabc::emit_report(report, mdabc::ReportFormat::json, flags.out);
    if (!flags.quiet) {
      std::printf("grid points: %zu  methods: %zu  wall_seconds: %.1f\n",
                  report.points.size(), report.method_labels.size(), wall);
      std::printf("wrote sweep.csv, report.json, config.json to %s\n",
                  flags.out.c_str());
    }
  } else {
    const auto report = mdabc::run_replications(plan.experiment);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    mdabc::emit_report(report, mdabc::ReportFormat::csv, flags.out);
    mdabc::emit_report(report, mdabc::ReportFormat::json, flags.out);
    if (!flags.quiet) {
      std::printf("replications: %zu  methods: %zu  wall_seconds: %.1f\n",
                  report.replications.size(), report.method_labels.size(), wall);
      for (const auto& agg : report.aggregates) {
        std::printf("  %s: %zu/%zu succeeded%s\n", agg.label.c_str(), agg.successes,
                    report.replications.size(), agg.valid ? "" : "  [below 90%]");
      }
      std::printf(
          "wrote means.csv, std.csv, cov.csv, rmse.csv, replications.csv, "
          "report.json, config.json to %s\n",
          flags.out.c_str());
    }
  }
  return 0;
}

int cmd_distance(const std::string& method, const std::string& file_y,
                 const std::string& file_z, double bandwidth, int grid_points,
                 double p) {
  mdabc::Dataset y, z;
  try {
    y = mdabc::read_dataset_csv(file_y);
    z = mdabc::read_dataset_csv(file_z);
  } catch (const mdabc::IoFailure& e) {
    fail(e.what());
    return 2;
  }

  mdabc::DistanceKind kind;
  if (method == "wasserstein") {
    kind = mdabc::DistanceKind::wasserstein(p);
  } else if (method == "cvm") {
    kind = mdabc::DistanceKind::cvm();
  } else if (method == "hellinger") {
    kind = mdabc::DistanceKind::hellinger();
  } else {
    throw mdabc::InvalidParameter("unknown distance \"" + method + "\"");
  }

  mdabc::DistanceContextOptions options;
  options.bandwidth = bandwidth;
  options.grid_points = grid_points;
  const mdabc::DistanceContext ctx(kind, y, options);
  std::printf("%.17g\n", ctx.evaluate(z.values));
  return 0;
}

int cmd_simulate(const GlobalFlags& flags, const std::string& model_name,
                 const std::string& theta_text, std::size_t n,
                 const std::string& file_name) {
  if (n == 0) throw mdabc::InvalidParameter("need at least one draw");
  if (file_name.empty() || file_name.find('/') != std::string::npos ||
      file_name.find('\\') != std::string::npos) {
    throw mdabc::InvalidParameter(
        "--file must be a bare file name inside the output directory");
  }
  const auto theta = parse_theta(theta_text);
  mdabc::ModelSpec spec;
  switch (mdabc::model_name_from_string(model_name)) {
    case mdabc::ModelName::mixture:
      spec = mdabc::ModelSpec::mixture(n, n);
      break;
    case mdabc::ModelName::gk:
      spec = mdabc::ModelSpec::gk(n, n);
      break;
    case mdabc::ModelName::mg1:
      spec = mdabc::ModelSpec::mg1(n, n);
      break;
    case mdabc::ModelName::sv:
      spec = mdabc::ModelSpec::sv(n, n);
      break;
  }
  if (theta.size() != spec.prior.dimension()) {
    throw mdabc::DimensionMismatch("theta has " + std::to_string(theta.size()) +
                                   " components; " + model_name + " needs " +
                                   std::to_string(spec.prior.dimension()));
  }

  // Same stream address the experiment harness uses for replication 0, so a
  // standalone simulation reproduces an experiment's first observed dataset.
  mdabc::RngStream rng(flags.seed, 0, mdabc::detail::kExperimentObservedUnit, 0);
  const mdabc::Dataset data = mdabc::generate_observed(spec, theta, rng);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(flags.out, ec);
  if (ec) throw mdabc::IoFailure("cannot create directory: " + flags.out);
  const auto path = (fs::path(flags.out) / file_name).string();
  mdabc::write_dataset_csv(data, path);

  if (!flags.quiet) {
    std::vector<double> sorted = data.values;
    std::sort(sorted.begin(), sorted.end());
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    const double median = (n % 2 == 1)
                              ? sorted[n / 2]
                              : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    std::printf("n %zu\n", n);
    std::printf("mean %.17g\n", mean);
    std::printf("sd %.17g\n", sd);
    std::printf("min %.17g\n", sorted.front());
    std::printf("median %.17g\n", median);
    std::printf("max %.17g\n", sorted.back());
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimum-distance ABC: simulation-based inference experiments"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "Master seed (overrides the config's)");
  app.add_option("--out", flags.out, "Output directory")
      ->capture_default_str();
  app.add_option("--threads", flags.threads, "Worker thread count")
      ->capture_default_str();
  app.add_flag("--quiet", flags.quiet, "Suppress informational output");

  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->fallthrough();
  std::string config_path;
  std::uint64_t reps_override = 0;
  std::uint64_t budget_override = 0;
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--n-replications", reps_override,
                  "Override the config's replication count");
  run->add_option("--sim-budget", budget_override,
                  "Override the config's simulation budget");

  auto* dist = app.add_subcommand(
      "distance", "Distance between the empirical measures of two CSV datasets");
  dist->fallthrough();
  std::string method, file_y, file_z;
  double bandwidth = 0.0;
  int grid_points = 512;
  double order_p = 1.0;
  dist->add_option("method", method, "wasserstein | cvm | hellinger")->required();
  dist->add_option("y", file_y, "Reference dataset CSV")->required();
  dist->add_option("z", file_z, "Comparison dataset CSV")->required();
  dist->add_option("--bandwidth", bandwidth,
                   "Density bandwidth (default: rule of thumb on y)");
  dist->add_option("--grid-points", grid_points, "Density grid size")
      ->capture_default_str();
  dist->add_option("--p", order_p, "Wasserstein order")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Simulate a dataset to CSV");
  sim->fallthrough();
  std::string model_name, theta_text, file_name = "dataset.csv";
  std::size_t n_draws = 0;
  sim->add_option("model", model_name, "mixture | gk | mg1 | sv")->required();
  sim->add_option("--theta", theta_text, "Comma-separated parameter vector")
      ->required();
  sim->add_option("--n", n_draws, "Number of observations")->required();
  sim->add_option("--file", file_name, "Output file name inside --out")
      ->capture_default_str();

  auto* version = app.add_subcommand("version", "Print the version");
  version->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  flags.seed_given = app.count("--seed") > 0;

  if (*version) {
    std::printf("%s %s\n", mdabc::kProjectName.data(), mdabc::kVersion.data());
    return 0;
  }
  if (*run) {
    return guarded([&] { return cmd_run(flags, config_path, reps_override,
                                        budget_override); });
  }
  if (*dist) {
    return guarded([&] {
      return cmd_distance(method, file_y, file_z, bandwidth, grid_points, order_p);
    });
  }
  if (*sim) {
    return guarded([&] {
      return cmd_simulate(flags, model_name, theta_text, n_draws, file_name);
    });
  }
  return 2;
}
