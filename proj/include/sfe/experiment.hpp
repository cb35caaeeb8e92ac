#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sfe/config.hpp"

namespace sfe::harness {

struct ResultRow {
  double frequency_hz = 0.0;
  std::string estimator;
  double nmse_db = 0.0;        // NaN when the estimator failed
  double fit_seconds = -1.0;   // < 0 when timing is not recorded
  std::string error;
};

struct DiagnosticRow {
  double frequency_hz = 0.0;
  std::string estimator;
  std::string name;
  double value = 0.0;
};

struct ResultsBundle {
  std::vector<ResultRow> rows;  // frequency-major, estimators in config order
  std::vector<DiagnosticRow> diagnostics;
};

struct RunOptions {
  int threads = 1;
  std::optional<std::uint64_t> seed;          // overrides the config seed
  std::optional<std::filesystem::path> out;   // write CSVs when set
};

/// Simulate, observe, fit, predict and score every (frequency, estimator)
/// pair. Output is independent of the thread count.
ResultsBundle run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Seed shared by every estimator at one frequency (noise realization).
std::uint64_t frequency_seed(std::uint64_t base, std::size_t frequency_index);

/// Observations at every frequency of the scene, in order.
std::vector<acoustics::ObservationSet> simulate_observations(const Scene& scene, int threads = 1);

void write_results_csv(std::ostream& os, const ResultsBundle& bundle);
void write_diagnostics_csv(std::ostream& os, const ResultsBundle& bundle);

}  // namespace sfe::harness
