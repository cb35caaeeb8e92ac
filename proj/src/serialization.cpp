#include "sfe/serialization.hpp"

#include "sfe/json_reader.hpp"

namespace sfe::harness {

namespace {

const json& array_at(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where, "expected an array");
  return j;
}

}  // namespace

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j, const std::string& where) {
  array_at(j, where);
  if (j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
    throw ConfigError(where, "expected three numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json positions_to_json(const Positions& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back(vec3_to_json(p));
  return out;
}

Positions positions_from_json(const json& j, const std::string& where) {
  Positions pts;
  for (std::size_t i = 0; i < array_at(j, where).size(); ++i)
    pts.push_back(vec3_from_json(j[i], where + "/" + std::to_string(i)));
  return pts;
}

json cvector_to_json(const CVector& v) {
  json out = json::array();
  for (const auto& c : v) out.push_back(json::array({c.real(), c.imag()}));
  return out;
}

CVector cvector_from_json(const json& j, const std::string& where) {
  CVector v(static_cast<Eigen::Index>(array_at(j, where).size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw ConfigError(where + "/" + std::to_string(i), "expected [re, im]");
    v[static_cast<Eigen::Index>(i)] = cplx(e[0].get<double>(), e[1].get<double>());
  }
  return v;
}

json basis_to_json(const expansion::BasisSpec& spec) {
  if (const auto* p = std::get_if<expansion::PlaneWaveBasis>(&spec)) {
    json dirs = json::array();
    for (const auto& d : p->directions) dirs.push_back(vec3_to_json(d.vec()));
    return {{"kind", "plane_wave"}, {"directions", dirs}};
  }
  if (const auto* s = std::get_if<expansion::SphericalWaveBasis>(&spec))
    return {{"kind", "spherical_wave"}, {"order", s->order}, {"center", vec3_to_json(s->center)}};
  return {{"kind", "equivalent_source"},
          {"sources", positions_to_json(std::get<expansion::EquivalentSourceBasis>(spec).sources)}};
}

expansion::BasisSpec basis_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  const auto kind = r.get<std::string>("kind");
  expansion::BasisSpec spec;
  if (kind == "plane_wave") {
    expansion::PlaneWaveBasis b;
    for (const auto& p : positions_from_json(r.raw("directions"), r.path("directions"))) b.directions.emplace_back(p);
    spec = std::move(b);
  } else if (kind == "spherical_wave") {
    spec = expansion::SphericalWaveBasis{r.get<int>("order"), vec3_from_json(r.raw("center"), r.path("center"))};
  } else if (kind == "equivalent_source") {
    spec = expansion::EquivalentSourceBasis{positions_from_json(r.raw("sources"), r.path("sources"))};
  } else {
    throw ConfigError(r.path("kind"), "unknown basis kind '" + kind + "'");
  }
  r.finish();
  return spec;
}

json kernel_solution_to_json(const kernel::KernelSolution& sol) {
  return {{"family", kernel::family_name(sol.spec.family)},
          {"wavenumber", sol.spec.wavenumber},
          {"peak", vec3_to_json(sol.spec.peak.vec())},
          {"sharpness", sol.spec.sharpness},
          {"width", sol.spec.width},
          {"lambda", sol.lambda},
          {"positions", positions_to_json(sol.positions)},
          {"weights", cvector_to_json(sol.weights)}};
}

kernel::KernelSolution kernel_solution_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  kernel::KernelSolution sol;
  try {
    sol.spec.family = kernel::parse_family(r.get<std::string>("family"));
    sol.spec.peak = Direction(vec3_from_json(r.raw("peak"), r.path("peak")));
  } catch (const DomainError& e) {
    throw ConfigError(where, e.what());
  }
  sol.spec.wavenumber = r.get<double>("wavenumber");
  sol.spec.sharpness = r.get<double>("sharpness");
  sol.spec.width = r.get<double>("width");
  sol.lambda = r.get<double>("lambda");
  sol.positions = positions_from_json(r.raw("positions"), r.path("positions"));
  sol.weights = cvector_from_json(r.raw("weights"), r.path("weights"));
  r.finish();
  if (static_cast<Eigen::Index>(sol.positions.size()) != sol.weights.size())
    throw ConfigError(where, "positions and weights differ in length");
  sol.spec.validate();
  return sol;
}

json field_model_to_json(const neural::MlpModel& model) {
  json layers = json::array();
  json acts = json::array();
  for (const auto& l : model.net.layers()) {
    layers.push_back({{"weight", std::vector<double>(l.weight.data(), l.weight.data() + l.weight.size())},
                      {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
    acts.push_back(neural::activation_name(l.activation));
  }
  return {{"widths", model.net.widths()},
          {"activations", acts},
          {"center", vec3_to_json(model.center)},
          {"scale", model.scale},
          {"layers", layers}};
}

neural::MlpModel field_model_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  const auto widths = r.get<std::vector<int>>("widths");
  const auto acts = r.get<std::vector<std::string>>("activations");
  const json& layers = r.raw("layers");
  if (widths.size() < 2 || acts.size() + 1 != widths.size() || !layers.is_array() || layers.size() != acts.size())
    throw ConfigError(where, "widths, activations and layers are inconsistent");
  std::vector<neural::DenseLayer> dense;
  for (std::size_t i = 0; i < acts.size(); ++i) {
    const std::string at = r.path("layers") + "/" + std::to_string(i);
    ObjectReader lr(layers[i], at);
    const auto w = lr.get<std::vector<double>>("weight");
    const auto b = lr.get<std::vector<double>>("bias");
    lr.finish();
    const int out = widths[i + 1], in = widths[i];
    if (static_cast<int>(w.size()) != out * in || static_cast<int>(b.size()) != out)
      throw ConfigError(at, "array sizes do not match widths");
    neural::DenseLayer l{Eigen::Map<const Eigen::MatrixXd>(w.data(), out, in),
                         Eigen::Map<const Eigen::VectorXd>(b.data(), out), neural::Activation::linear};
    try {
      l.activation = neural::parse_activation(acts[i]);
    } catch (const DomainError& e) {
      throw ConfigError(r.path("activations"), e.what());
    }
    dense.push_back(std::move(l));
  }
  neural::MlpModel model{neural::Mlp(std::move(dense)), vec3_from_json(r.raw("center"), r.path("center")),
                         r.get<double>("scale")};
  r.finish();
  model.validate();
  return model;
}

}  // namespace sfe::harness
