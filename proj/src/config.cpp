#include "sfe/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sfe/json_reader.hpp"
#include "sfe/specfun.hpp"

namespace sfe::harness {

namespace {

std::vector<double> parse_frequencies(const json& j, const std::string& where) {
  std::vector<double> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) throw ConfigError(where + "/" + std::to_string(i), "expected a number");
      out.push_back(j[i].get<double>());
    }
  } else {
    ObjectReader r(j, where);
    const double start = r.get<double>("start");
    const double stop = r.get<double>("stop");
    const double step = r.get<double>("step");
    r.finish();
    if (!(step > 0.0) || stop < start) throw ConfigError(where, "need start <= stop and step > 0");
    const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < n; ++i) out.push_back(start + i * step);
  }
  if (out.empty()) throw ConfigError(where, "frequency list is empty");
  for (double f : out)
    if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError(where, "frequencies must be positive");
  return out;
}

acoustics::ArraySpec parse_array(const json& j, const std::string& where, const acoustics::RegionSpec& region) {
  ObjectReader r(j, where);
  const auto kind = r.get<std::string>("kind");
  acoustics::ArraySpec spec;
  if (kind == "dual_sphere") {
    acoustics::DualSphereArray a;
    a.center = r.has("center") ? r.vec3("center") : region.center();
    const auto radii = r.get_or<std::vector<double>>("radii", {0.50, 0.49});
    const auto counts = r.get_or<std::vector<int>>("counts", {21, 20});
    if (radii.size() != 2 || counts.size() != 2) throw ConfigError(where, "radii and counts need two entries");
    a.outer_radius = radii[0];
    a.inner_radius = radii[1];
    a.outer_count = counts[0];
    a.inner_count = counts[1];
    spec = a;
  } else if (kind == "grid") {
    acoustics::GridArray a;
    a.center = r.has("center") ? r.vec3("center") : region.center();
    a.half_extents = r.has("half_extents") ? r.vec3("half_extents") : region.bounding_half_extents();
    const auto counts = r.get<std::vector<int>>("counts");
    if (counts.size() != 3) throw ConfigError(r.path("counts"), "expected three counts");
    a.counts = {counts[0], counts[1], counts[2]};
    spec = a;
  } else if (kind == "random_in_region") {
    spec = acoustics::RandomArray{region, r.get<int>("count")};
  } else {
    throw ConfigError(r.path("kind"), "unknown array kind '" + kind + "'");
  }
  r.finish();
  return spec;
}

}  // namespace

acoustics::RegionSpec region_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  const auto shape = r.get<std::string>("shape");
  acoustics::RegionSpec region{acoustics::Ball{}};
  if (shape == "ball") {
    region.shape = acoustics::Ball{r.vec3("center"), r.get<double>("radius")};
  } else if (shape == "box") {
    region.shape = acoustics::Box{r.vec3("center"), r.vec3("half_extents")};
  } else {
    throw ConfigError(r.path("shape"), "unknown region shape '" + shape + "'");
  }
  r.finish();
  try {
    region.validate();
  } catch (const DomainError& e) {
    throw ConfigError(where, e.what());
  }
  return region;
}

json region_to_json(const acoustics::RegionSpec& region) {
  auto v3 = [](const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); };
  if (const auto* b = std::get_if<acoustics::Ball>(&region.shape))
    return {{"shape", "ball"}, {"center", v3(b->center)}, {"radius", b->radius}};
  const auto& x = std::get<acoustics::Box>(region.shape);
  return {{"shape", "box"}, {"center", v3(x.center)}, {"half_extents", v3(x.half_extents)}};
}

Scene parse_scene(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  Scene s;
  {
    auto room = r.child("room");
    s.room.dimensions = room.vec3("dimensions");
    s.room.sound_speed = room.get_or<double>("sound_speed", acoustics::kDefaultSoundSpeed);
    const bool has_t60 = room.has("t60");
    const bool has_refl = room.has("reflection");
    if (has_t60 == has_refl) throw ConfigError(room.where(), "give exactly one of t60 or reflection");
    try {
      if (has_t60) {
        s.t60 = room.get<double>("t60");
        s.room.reflection = acoustics::t60_to_reflection(s.room.dimensions, *s.t60);
      } else {
        s.room.reflection = room.get<double>("reflection");
      }
      s.room.validate();
    } catch (const DomainError& e) {
      throw ConfigError(room.where(), e.what());
    } catch (const InfeasibleError& e) {
      throw ConfigError(room.where(), e.what());
    }
    s.max_order = room.get_or<int>("max_order", acoustics::default_max_order(s.room.reflection));
    if (s.max_order < 0) throw ConfigError(room.path("max_order"), "must be >= 0");
    room.finish();
  }
  s.source = r.vec3("source");
  if (!s.room.strictly_inside(s.source)) throw ConfigError(r.path("source"), "source must lie strictly inside the room");
  s.region = region_from_json(r.raw("region"), r.path("region"));
  if (s.region.contains(s.source)) throw ConfigError(r.path("source"), "source must lie outside the target region");
  s.array = parse_array(r.raw("array"), r.path("array"), s.region);
  s.frequencies = parse_frequencies(r.raw("frequencies"), r.path("frequencies"));
  if (r.has("snr_db") && !r.raw("snr_db").is_null()) s.snr_db = r.get<double>("snr_db");
  s.seed = r.get_or<std::uint64_t>("seed", 1);
  r.finish();
  return s;
}

Positions EvalGridSpec::points(const acoustics::RegionSpec& region) const {
  if (kind == "lattice") return lattice_in_region(region, spacing);
  if (kind == "fibonacci") {
    const auto* ball = std::get_if<acoustics::Ball>(&region.shape);
    if (!ball) throw ConfigError("/grid", "fibonacci evaluation grid needs a ball region");
    return specfun::fibonacci_ball(count, ball->center, ball->radius);
  }
  throw ConfigError("/grid/kind", "unknown grid kind '" + kind + "'");
}

ExperimentConfig parse_experiment(const json& j, const std::filesystem::path& base_dir, const std::string& where) {
  ObjectReader r(j, where);
  ExperimentConfig cfg;
  const json& scene = r.raw("scene");
  if (scene.is_string()) {
    const auto path = base_dir / scene.get<std::string>();
    cfg.scene = parse_scene(read_json_file(path), path.string() + ":");
  } else {
    cfg.scene = parse_scene(scene, r.path("scene"));
  }

  const json& ests = r.raw("estimators");
  if (!ests.is_array() || ests.empty()) throw ConfigError(r.path("estimators"), "expected a nonempty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < ests.size(); ++i) {
    const std::string at = r.path("estimators") + "/" + std::to_string(i);
    if (!ests[i].is_object()) throw ConfigError(at, "expected an object");
    EstimatorConfig e;
    e.params = ests[i];
    if (!e.params.contains("type") || !e.params["type"].is_string()) throw ConfigError(at, "missing estimator type");
    e.type = e.params["type"].get<std::string>();
    e.name = e.params.value("name", e.type);
    e.params.erase("type");
    e.params.erase("name");
    if (!names.insert(e.name).second) e.name += "#" + std::to_string(i);
    cfg.estimators.push_back(std::move(e));
  }

  if (r.has("frequencies")) cfg.scene.frequencies = parse_frequencies(r.raw("frequencies"), r.path("frequencies"));
  if (r.has("grid")) {
    auto g = r.child("grid");
    cfg.grid.kind = g.get_or<std::string>("kind", "lattice");
    cfg.grid.spacing = g.get_or<double>("spacing", cfg.grid.spacing);
    cfg.grid.count = g.get_or<int>("count", cfg.grid.count);
    g.finish();
    if (cfg.grid.kind != "lattice" && cfg.grid.kind != "fibonacci")
      throw ConfigError(g.path("kind"), "unknown grid kind '" + cfg.grid.kind + "'");
    if (!(cfg.grid.spacing > 0.0) || cfg.grid.count < 1) throw ConfigError(g.where(), "grid size must be positive");
  }
  if (r.has("seed")) cfg.scene.seed = r.get<std::uint64_t>("seed");
  if (r.has("heatmap")) {
    auto h = r.child("heatmap");
    PlaneSpec p;
    const auto axis = h.get_or<std::string>("axis", "z");
    if (axis != "x" && axis != "y" && axis != "z") throw ConfigError(h.path("axis"), "axis must be x, y or z");
    p.axis = axis[0] - 'x';
    p.offset = h.get_or<double>("offset", cfg.scene.region.center()[p.axis]);
    p.resolution = h.get_or<int>("resolution", 21);
    h.finish();
    cfg.heatmap = p;
  }
  cfg.record_timing = r.get_or<bool>("record_timing", false);
  cfg.threads = r.get_or<int>("threads", 1);
  if (cfg.threads < 1) throw ConfigError(r.path("threads"), "must be >= 1");
  r.finish();
  return cfg;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": byte " + std::to_string(e.byte), e.what());
  }
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return parse_experiment(read_json_file(path), path.parent_path(), path.string() + ":");
}

ExperimentConfig load_experiment_or_scene(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  if (j.is_object() && j.contains("room")) {
    ExperimentConfig cfg;
    cfg.scene = parse_scene(j, path.string() + ":");
    cfg.estimators.push_back({"uniform_kernel", "uniform_kernel", json::object()});
    return cfg;
  }
  return parse_experiment(j, path.parent_path(), path.string() + ":");
}

}  // namespace sfe::harness
