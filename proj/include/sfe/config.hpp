#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfe/acoustics.hpp"
#include "sfe/metrics.hpp"

namespace sfe::harness {

/// Simulated measurement scene.
///
/// Schema (all lengths in meters):
///   room:        { dimensions: [x,y,z], t60 | reflection, sound_speed?, max_order? }
///   source:      [x,y,z]
///   region:      { shape: "ball", center, radius } | { shape: "box", center, half_extents }
///   array:       { kind: "dual_sphere", radii: [outer, inner], counts: [outer, inner], center? }
///              | { kind: "grid", counts: [nx,ny,nz], center?, half_extents? }
///              | { kind: "random_in_region", count }
///   frequencies: [f, ...] | { start, stop, step }   (Hz)
///   snr_db:      number | null (noise free)
///   seed:        unsigned integer
struct Scene {
  acoustics::RoomSpec room;
  std::optional<double> t60;
  int max_order = 0;
  Vec3 source = Vec3::Zero();
  acoustics::RegionSpec region{acoustics::Ball{}};
  acoustics::ArraySpec array;
  std::vector<double> frequencies;
  double snr_db = acoustics::kNoNoise;
  std::uint64_t seed = 1;
};

/// Evaluation points inside the region: { kind: "lattice", spacing } or
/// { kind: "fibonacci", count } (ball regions only).
struct EvalGridSpec {
  std::string kind = "lattice";
  double spacing = 0.1;
  int count = 200;

  Positions points(const acoustics::RegionSpec& region) const;
};

struct EstimatorConfig {
  std::string name;  // row label, unique per experiment
  std::string type;
  nlohmann::json params = nlohmann::json::object();
};

/// Experiment schema:
///   scene:          path (relative to the config file) or inline scene object
///   estimators:     [ { name?, type, ...params } ]
///   frequencies:    optional override of the scene's list
///   grid:           EvalGridSpec
///   seed:           overrides the scene seed
///   heatmap:        optional { axis: "x"|"y"|"z", offset, resolution }
///   record_timing:  bool, default false (fit_seconds column left empty)
///   threads:        default worker count
struct ExperimentConfig {
  Scene scene;
  std::vector<EstimatorConfig> estimators;
  EvalGridSpec grid;
  std::optional<PlaneSpec> heatmap;
  bool record_timing = false;
  int threads = 1;
};

Scene parse_scene(const nlohmann::json& j, const std::string& where = "");
ExperimentConfig parse_experiment(const nlohmann::json& j, const std::filesystem::path& base_dir,
                                  const std::string& where = "");

nlohmann::json read_json_file(const std::filesystem::path& path);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Either an experiment file or a bare scene file (wrapped with default settings).
ExperimentConfig load_experiment_or_scene(const std::filesystem::path& path);

nlohmann::json region_to_json(const acoustics::RegionSpec& region);
acoustics::RegionSpec region_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace sfe::harness
