#include "sfe/experiment.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "sfe/errors.hpp"
#include "sfe/estimators.hpp"
#include "sfe/util.hpp"

namespace sfe::harness {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Runs job(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

std::string freq_tag(double f) { return fmt_double(f); }

struct FrequencyOutput {
  std::vector<ResultRow> rows;
  std::vector<DiagnosticRow> diagnostics;
  std::vector<std::pair<std::string, std::string>> heatmaps;  // file name, CSV body
};

}  // namespace

std::uint64_t frequency_seed(std::uint64_t base, std::size_t frequency_index) {
  return splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(frequency_index) + 1));
}

std::vector<acoustics::ObservationSet> simulate_observations(const Scene& scene, int threads) {
  const auto mics = acoustics::make_array(scene.array, scene.seed);
  const acoustics::ImageSourceModel ism(scene.room, scene.source, scene.max_order);
  std::vector<acoustics::ObservationSet> out(scene.frequencies.size());
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const double k = acoustics::wavenumber(scene.frequencies[i], scene.room.sound_speed);
    acoustics::ObservationSet clean{k, mics, ism.pressures(mics, k)};
    out[i] = acoustics::add_noise(clean, scene.snr_db, frequency_seed(scene.seed, i));
  });
  return out;
}

ResultsBundle run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  Scene scene = config.scene;
  if (options.seed) scene.seed = *options.seed;
  if (config.estimators.empty()) throw ConfigError("/estimators", "no estimators configured");

  const auto mics = acoustics::make_array(scene.array, scene.seed);
  for (const auto& m : mics)
    if (!scene.room.strictly_inside(m)) throw ConfigError("/array", "microphone outside the room");
  const Positions grid = config.grid.points(scene.region);
  if (grid.empty()) throw ConfigError("/grid", "evaluation grid has no points inside the region");
  const acoustics::ImageSourceModel ism(scene.room, scene.source, scene.max_order);
  std::optional<HeatmapGrid> heat;
  if (config.heatmap) heat = heatmap_grid(scene.region, *config.heatmap);

  std::vector<FrequencyOutput> outputs(scene.frequencies.size());
  parallel_for(outputs.size(), options.threads, [&](std::size_t fi) {
    const double f = scene.frequencies[fi];
    const double k = acoustics::wavenumber(f, scene.room.sound_speed);
    const std::uint64_t fseed = frequency_seed(scene.seed, fi);
    const CVector truth = ism.pressures(grid, k);
    acoustics::ObservationSet obs{k, mics, ism.pressures(mics, k)};
    obs = acoustics::add_noise(obs, scene.snr_db, fseed);

    auto& out = outputs[fi];
    if (heat) {
      std::ostringstream os;
      write_heatmap_csv(os, *heat, ism.pressures(heat->points, k));
      out.heatmaps.emplace_back("heatmap_" + freq_tag(f) + "hz_truth.csv", os.str());
    }
    for (const auto& est : config.estimators) {
      ResultRow row{f, est.name, std::numeric_limits<double>::quiet_NaN(), -1.0, {}};
      EstimatorContext ctx{&scene, obs, f, splitmix64(fseed), &grid};
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const auto fitted = fit_estimator(est, ctx);
        const auto t1 = std::chrono::steady_clock::now();
        row.nmse_db = nmse_db(fitted->predict(grid), truth);
        if (config.record_timing) row.fit_seconds = std::chrono::duration<double>(t1 - t0).count();
        for (const auto& [name, value] : fitted->diagnostics) out.diagnostics.push_back({f, est.name, name, value});
        if (heat) {
          try {
            std::ostringstream os;
            write_heatmap_csv(os, *heat, fitted->predict(heat->points));
            out.heatmaps.emplace_back("heatmap_" + freq_tag(f) + "hz_" + est.name + ".csv", os.str());
          } catch (const DomainError&) {
            // discretized estimators have no values off their target grid
          }
        }
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      out.rows.push_back(std::move(row));
    }
  });

  ResultsBundle bundle;
  for (auto& o : outputs) {
    bundle.rows.insert(bundle.rows.end(), o.rows.begin(), o.rows.end());
    bundle.diagnostics.insert(bundle.diagnostics.end(), o.diagnostics.begin(), o.diagnostics.end());
  }

  if (options.out) {
    std::filesystem::create_directories(*options.out);
    std::ofstream nm(*options.out / "nmse.csv");
    write_results_csv(nm, bundle);
    std::ofstream dg(*options.out / "diagnostics.csv");
    write_diagnostics_csv(dg, bundle);
    for (const auto& o : outputs)
      for (const auto& [name, body] : o.heatmaps) std::ofstream(*options.out / name) << body;
  }
  return bundle;
}

void write_results_csv(std::ostream& os, const ResultsBundle& bundle) {
  os << "frequency_hz,estimator,nmse_db,fit_seconds\n";
  for (const auto& r : bundle.rows)
    os << fmt_double(r.frequency_hz) << ',' << r.estimator << ',' << fmt_double(r.nmse_db) << ','
       << (r.fit_seconds >= 0.0 ? fmt_double(r.fit_seconds) : "") << '\n';
}

void write_diagnostics_csv(std::ostream& os, const ResultsBundle& bundle) {
  os << "frequency_hz,estimator,diagnostic,value\n";
  for (const auto& d : bundle.diagnostics)
    os << fmt_double(d.frequency_hz) << ',' << d.estimator << ',' << d.name << ',' << fmt_double(d.value) << '\n';
}

}  // namespace sfe::harness
