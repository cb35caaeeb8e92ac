// Command-line front end: simulate, estimate, evaluate, sweep, export.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sfe/config.hpp"
#include "sfe/errors.hpp"
#include "sfe/estimators.hpp"
#include "sfe/experiment.hpp"
#include "sfe/util.hpp"

namespace fs = std::filesystem;
using namespace sfe;
using namespace sfe::harness;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

std::string solution_name(double f, const std::string& estimator) {
  return "solution_" + fmt_double(f) + "hz_" + estimator + ".json";
}

int cmd_simulate(const fs::path& config, std::optional<std::uint64_t> seed, const fs::path& out, int threads) {
  auto cfg = load_experiment_or_scene(config);
  if (seed) cfg.scene.seed = *seed;
  const auto& scene = cfg.scene;
  const auto obs = simulate_observations(scene, threads);
  const auto grid = cfg.grid.points(scene.region);
  const acoustics::ImageSourceModel ism(scene.room, scene.source, scene.max_order);

  fs::create_directories(out);
  std::ofstream os(out / "observations.csv");
  os << "frequency_hz,mic,x,y,z,re,im\n";
  for (std::size_t fi = 0; fi < obs.size(); ++fi)
    for (std::size_t m = 0; m < obs[fi].size(); ++m) {
      const auto& p = obs[fi].positions[m];
      const cplx v = obs[fi].pressures[static_cast<Eigen::Index>(m)];
      os << fmt_double(scene.frequencies[fi]) << ',' << m << ',' << fmt_double(p.x()) << ',' << fmt_double(p.y()) << ','
         << fmt_double(p.z()) << ',' << fmt_double(v.real()) << ',' << fmt_double(v.imag()) << '\n';
    }
  std::ofstream ts(out / "truth.csv");
  ts << "frequency_hz,point,x,y,z,re,im\n";
  for (double f : scene.frequencies) {
    const auto truth = ism.pressures(grid, acoustics::wavenumber(f, scene.room.sound_speed));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& p = grid[i];
      const cplx v = truth[static_cast<Eigen::Index>(i)];
      ts << fmt_double(f) << ',' << i << ',' << fmt_double(p.x()) << ',' << fmt_double(p.y()) << ','
         << fmt_double(p.z()) << ',' << fmt_double(v.real()) << ',' << fmt_double(v.imag()) << '\n';
    }
  }
  return 0;
}

int cmd_estimate(const fs::path& config, std::optional<std::uint64_t> seed, const fs::path& out,
                 const std::string& estimator) {
  auto cfg = load_experiment_or_scene(config);
  if (seed) cfg.scene.seed = *seed;
  const EstimatorConfig* chosen = nullptr;
  EstimatorConfig by_type;
  for (const auto& e : cfg.estimators)
    if (e.name == estimator) chosen = &e;
  if (!chosen) {
    by_type = {estimator, estimator, nlohmann::json::object()};
    chosen = &by_type;
  }
  const auto obs = simulate_observations(cfg.scene);
  const auto grid = cfg.grid.points(cfg.scene.region);
  fs::create_directories(out);
  for (std::size_t fi = 0; fi < obs.size(); ++fi) {
    const double f = cfg.scene.frequencies[fi];
    EstimatorContext ctx{&cfg.scene, obs[fi], f, frequency_seed(cfg.scene.seed, fi) ^ 0x5eedULL, &grid};
    const auto fitted = fit_estimator(*chosen, ctx);
    nlohmann::json doc = {{"estimator", chosen->name},
                          {"frequency_hz", f},
                          {"region", region_to_json(cfg.scene.region)},
                          {"solution", fitted->to_json()}};
    std::ofstream(out / solution_name(f, chosen->name)) << doc.dump(1) << '\n';
  }
  return 0;
}

int cmd_evaluate(const fs::path& config, const fs::path& solutions, const fs::path& out) {
  const auto cfg = load_experiment_or_scene(config);
  const auto& scene = cfg.scene;
  const auto grid = cfg.grid.points(scene.region);
  const acoustics::ImageSourceModel ism(scene.room, scene.source, scene.max_order);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(solutions))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  ResultsBundle bundle;
  for (const auto& file : files) {
    const auto doc = read_json_file(file);
    if (!doc.contains("solution") || !doc.contains("frequency_hz") || !doc.contains("estimator")) continue;
    const double f = doc["frequency_hz"].get<double>();
    const auto fitted = estimator_from_json(doc["solution"], file.string() + ":/solution");
    const CVector truth = ism.pressures(grid, acoustics::wavenumber(f, scene.room.sound_speed));
    ResultRow row{f, doc["estimator"].get<std::string>(), std::numeric_limits<double>::quiet_NaN(), -1.0, {}};
    try {
      row.nmse_db = nmse_db(fitted->predict(grid), truth);
    } catch (const sfe::DomainError& e) {
      row.error = e.what();
      std::cerr << "warning: " << file << ": " << e.what() << '\n';
    }
    bundle.rows.push_back(row);
  }
  std::stable_sort(bundle.rows.begin(), bundle.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) { return a.frequency_hz < b.frequency_hz; });
  fs::create_directories(out);
  std::ofstream os(out / "nmse.csv");
  write_results_csv(os, bundle);
  return 0;
}

int cmd_sweep(const fs::path& config, std::optional<std::uint64_t> seed, const fs::path& out,
              std::optional<int> threads) {
  const auto cfg = load_experiment(config);
  RunOptions opts;
  opts.threads = threads.value_or(cfg.threads);
  opts.seed = seed;
  opts.out = out;
  const auto bundle = run_experiment(cfg, opts);
  for (const auto& r : bundle.rows)
    if (!r.error.empty())
      std::cerr << "warning: " << r.estimator << " at " << r.frequency_hz << " Hz failed: " << r.error << '\n';
  return 0;
}

int cmd_export(const fs::path& solution, const std::string& axis, std::optional<double> offset, int resolution,
               const fs::path& out) {
  const auto doc = read_json_file(solution);
  if (!doc.contains("solution") || !doc.contains("region")) throw ConfigError(solution.string(), "not a solution file");
  const auto region = region_from_json(doc["region"], solution.string() + ":/region");
  const auto fitted = estimator_from_json(doc["solution"], solution.string() + ":/solution");
  if (axis != "x" && axis != "y" && axis != "z") throw ConfigError("--axis", "must be x, y or z");
  PlaneSpec plane;
  plane.axis = axis[0] - 'x';
  plane.offset = offset.value_or(region.center()[plane.axis]);
  plane.resolution = resolution;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream os(out);
  export_heatmap(os, region, plane, [&](const Positions& p) { return fitted->predict(p); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-informed sound field estimation toolkit"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<int> threads;
  std::string estimator;
  std::string solutions;
  std::string solution;
  std::string axis = "z";
  std::optional<double> offset;
  int resolution = 21;

  auto* simulate = app.add_subcommand("simulate", "scene -> observations.csv and truth.csv");
  auto* estimate = app.add_subcommand("estimate", "scene + estimator -> per-frequency solution files");
  auto* evaluate = app.add_subcommand("evaluate", "solution files -> nmse.csv");
  auto* sweep = app.add_subcommand("sweep", "full experiment run -> nmse.csv, diagnostics.csv, heatmaps");
  auto* exporter = app.add_subcommand("export", "solution file -> heatmap CSV slice");

  for (auto* sub : {simulate, estimate, evaluate, sweep}) sub->add_option("--config", config)->required();
  for (auto* sub : {simulate, estimate, sweep}) sub->add_option("--seed", seed);
  for (auto* sub : {simulate, estimate, evaluate, sweep, exporter}) sub->add_option("--out", out);
  for (auto* sub : {simulate, sweep}) sub->add_option("--threads", threads)->check(CLI::PositiveNumber);
  estimate->add_option("--estimator", estimator, "estimator name from the config, or a type")->required();
  evaluate->add_option("--solutions", solutions)->required();
  exporter->add_option("--solution", solution)->required();
  exporter->add_option("--axis", axis);
  exporter->add_option("--offset", offset);
  exporter->add_option("--resolution", resolution)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(config, seed, out, threads.value_or(1));
    if (*estimate) return cmd_estimate(config, seed, out, estimator);
    if (*evaluate) return cmd_evaluate(config, solutions, out);
    if (*sweep) return cmd_sweep(config, seed, out, threads);
    if (*exporter) return cmd_export(solution, axis, offset, resolution, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const sfe::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
