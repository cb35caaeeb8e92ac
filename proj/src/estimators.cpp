#include "sfe/estimators.hpp"

#include <cmath>
#include <numbers>

#include "sfe/expansion.hpp"
#include "sfe/json_reader.hpp"
#include "sfe/kernel.hpp"
#include "sfe/pinn.hpp"
#include "sfe/serialization.hpp"
#include "sfe/specfun.hpp"
#include "sfe/supervised.hpp"

namespace sfe::harness {

namespace {

class ExpansionEstimator final : public FittedEstimator {
 public:
  ExpansionEstimator(expansion::BasisSpec basis, expansion::ExpansionSolution sol, double k)
      : basis_(std::move(basis)), sol_(std::move(sol)), k_(k) {}

  CVector predict(const Positions& points) const override {
    return expansion::evaluate_expansion(basis_, sol_, points, k_);
  }
  json to_json() const override {
    return {{"kind", "expansion"},
            {"wavenumber", k_},
            {"lambda", sol_.lambda},
            {"basis", basis_to_json(basis_)},
            {"coefficients", cvector_to_json(sol_.coefficients)}};
  }
  bool helmholtz_exact() const override { return true; }

 private:
  expansion::BasisSpec basis_;
  expansion::ExpansionSolution sol_;
  double k_;
};

class KernelEstimator final : public FittedEstimator {
 public:
  explicit KernelEstimator(kernel::KernelSolution sol) : sol_(std::move(sol)) {}

  CVector predict(const Positions& points) const override { return kernel::kernel_predict(sol_, points); }
  json to_json() const override {
    json j = kernel_solution_to_json(sol_);
    j["kind"] = "kernel";
    return j;
  }
  bool helmholtz_exact() const override { return sol_.spec.family != kernel::KernelFamily::gaussian_baseline; }

 private:
  kernel::KernelSolution sol_;
};

class FieldNetEstimator final : public FittedEstimator {
 public:
  FieldNetEstimator(neural::MlpModel model, double output_scale)
      : model_(std::move(model)), output_scale_(output_scale) {}

  CVector predict(const Positions& points) const override {
    CVector out(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i)
      out[static_cast<Eigen::Index>(i)] = output_scale_ * neural::mlp_forward(model_, points[i]);
    return out;
  }
  json to_json() const override {
    return {{"kind", "field_model"}, {"output_scale", output_scale_}, {"model", field_model_to_json(model_)}};
  }
  bool helmholtz_exact() const override { return false; }

 private:
  neural::MlpModel model_;
  double output_scale_;
};

/// Field known only at fixed points (output of a discretized network).
class DiscreteEstimator final : public FittedEstimator {
 public:
  DiscreteEstimator(Positions points, CVector values) : points_(std::move(points)), values_(std::move(values)) {}

  CVector predict(const Positions& points) const override {
    if (points.size() != points_.size()) throw DomainError("discretized estimate exists only at its target points");
    for (std::size_t i = 0; i < points.size(); ++i)
      if ((points[i] - points_[i]).norm() > 1e-12)
        throw DomainError("discretized estimate exists only at its target points");
    return values_;
  }
  json to_json() const override {
    return {{"kind", "discrete"}, {"points", positions_to_json(points_)}, {"values", cvector_to_json(values_)}};
  }
  bool helmholtz_exact() const override { return false; }

 private:
  Positions points_;
  CVector values_;
};

double mean_column_energy(const CMatrix& phi) { return phi.squaredNorm() / static_cast<double>(phi.cols()); }

int default_basis_count(double k, double radius) {
  const int n = expansion::truncation_order(k, radius, expansion::TruncationRule::ceil_ekR_over_2);
  return 2 * (n + 1) * (n + 1);
}

Positions collocation_points(const acoustics::RegionSpec& region, int count) {
  if (count <= 0) return {};
  if (const auto* b = std::get_if<acoustics::Ball>(&region.shape))
    return specfun::fibonacci_ball(count, b->center, b->radius);
  for (int n = count;; n *= 2) {
    Positions inside;
    for (const auto& p : specfun::fibonacci_ball(n, region.center(), region.circumscribing_radius()))
      if (region.contains(p)) inside.push_back(p);
    if (static_cast<int>(inside.size()) >= count) {
      inside.resize(static_cast<std::size_t>(count));
      return inside;
    }
  }
}

std::unique_ptr<FittedEstimator> fit_ridge(ObjectReader& r, const std::string& type, const EstimatorContext& ctx) {
  const auto& scene = *ctx.scene;
  const auto& obs = ctx.observations;
  const double k = obs.wavenumber;
  const double radius = scene.region.circumscribing_radius();
  const double rel_lambda = r.get_or<double>("lambda", 1e-3);

  expansion::BasisSpec basis;
  if (type == "plane_wave_ridge" || type == "plane_wave_lasso") {
    basis = expansion::PlaneWaveBasis{specfun::fibonacci_directions(r.get_or<int>("directions", default_basis_count(k, radius)))};
  } else if (type == "spherical_wave_ridge") {
    const auto rule = r.get_or<std::string>("truncation", "ceil_kR");
    if (rule != "ceil_kR" && rule != "ceil_ekR_over_2") throw ConfigError(r.path("truncation"), "unknown rule");
    const int order = r.get_or<int>(
        "order", expansion::truncation_order(k, radius,
                                             rule == "ceil_kR" ? expansion::TruncationRule::ceil_kR
                                                               : expansion::TruncationRule::ceil_ekR_over_2));
    basis = expansion::SphericalWaveBasis{std::min(order, specfun::kMaxBesselOrder), scene.region.center()};
  } else {
    const int count = r.get_or<int>("count", default_basis_count(k, radius));
    const double factor = r.get_or<double>("radius_factor", 1.2);
    expansion::EquivalentSourceBasis b;
    for (const auto& d : specfun::fibonacci_directions(count))
      b.sources.push_back(scene.region.center() + factor * radius * d.vec());
    basis = std::move(b);
  }
  expansion::FistaOptions fopts;
  if (type == "plane_wave_lasso") {
    fopts.max_iter = r.get_or<int>("max_iter", 2000);
    fopts.tol = r.get_or<double>("tol", 1e-8);
  }
  r.finish();
  expansion::validate_basis(basis, scene.region);

  const auto dict = expansion::build_dictionary(basis, obs.positions, k);
  expansion::ExpansionSolution sol;
  if (type == "plane_wave_lasso") {
    const double kill = 2.0 * (dict.matrix.adjoint() * obs.pressures).cwiseAbs().maxCoeff();
    sol = expansion::fista_l1(dict, obs.pressures, rel_lambda * (kill > 0.0 ? kill : 1.0), fopts);
  } else {
    sol = expansion::ridge_solve(dict, obs.pressures, rel_lambda * mean_column_energy(dict.matrix));
  }
  auto fitted = std::make_unique<ExpansionEstimator>(basis, sol, k);
  fitted->diagnostics.emplace_back("basis_size", static_cast<double>(expansion::basis_size(basis)));
  fitted->diagnostics.emplace_back("training_residual", sol.residual_norm / std::max(1e-300, obs.pressures.norm()));
  return fitted;
}

std::unique_ptr<FittedEstimator> fit_kernel(ObjectReader& r, const std::string& type, const EstimatorContext& ctx) {
  const auto& obs = ctx.observations;
  const double k = obs.wavenumber;
  kernel::KernelSpec spec;
  if (type == "uniform_kernel") {
    spec = kernel::KernelSpec::uniform(k);
  } else if (type == "directional_kernel") {
    const double beta = r.get_or<double>("beta", 2.0);
    Vec3 peak = ctx.scene->region.center() - ctx.scene->source;
    if (r.has("peak")) {
      const json& p = r.raw("peak");
      if (!(p.is_string() && p.get<std::string>() == "source")) peak = vec3_from_json(p, r.path("peak"));
    }
    spec = kernel::KernelSpec::directional(k, Direction(peak), beta);
  } else {
    spec = kernel::KernelSpec::gaussian(k, r.get_or<double>("sigma_factor", 1.0) * k);
  }
  const double rel_lambda = r.get_or<double>("lambda", 1e-3);
  const auto selection = r.get_or<std::string>("lambda_selection", "fixed");
  r.finish();
  if (!(rel_lambda > 0.0)) throw ConfigError(r.path("lambda"), "must be positive");

  const double unit = kernel::default_lambda(kernel::gram_matrix(spec, obs.positions)) / 1e-3;
  double lambda = rel_lambda * unit;
  if (selection == "loo") {
    std::vector<double> grid;
    for (int e = -8; e <= 0; ++e) grid.push_back(std::pow(10.0, e) * unit);
    lambda = kernel::select_lambda_loo(spec, obs, grid);
  } else if (selection != "fixed") {
    throw ConfigError(r.path("lambda_selection"), "expected 'fixed' or 'loo'");
  }
  auto fitted = std::make_unique<KernelEstimator>(kernel::kernel_fit(spec, obs, lambda));
  fitted->diagnostics.emplace_back("lambda", lambda);
  return fitted;
}

double rms(const CVector& v) { return std::sqrt(v.squaredNorm() / static_cast<double>(v.size())); }

std::unique_ptr<FittedEstimator> fit_field_net(ObjectReader& r, const std::string& type, const EstimatorContext& ctx) {
  const auto& region = ctx.scene->region;
  const auto& obs = ctx.observations;
  const double k = obs.wavenumber;
  const double radius = region.circumscribing_radius();

  const auto hidden = r.get_or<std::vector<int>>("hidden", neural::kDefaultHidden);
  const auto act = r.get_or<std::string>("activation", "sine");
  const int n_colloc = r.get_or<int>("collocation", 56);
  neural::PinnConfig cfg;
  cfg.wavenumber = k;
  cfg.step = r.get_or<double>("step", 1e-3);
  cfg.iterations = r.get_or<int>("iterations", 3000);
  const double first_freq = r.get_or<double>("first_layer_frequency", std::max(1.0, k * radius));
  const auto seed = r.get_or<std::uint64_t>("seed", 0);
  if (type == "pinn") {
    if (r.has("pde_weight") && !r.raw("pde_weight").is_string()) cfg.pde_weight = r.get<double>("pde_weight");
    else if (r.has("pde_weight") && r.get<std::string>("pde_weight") != "auto")
      throw ConfigError(r.path("pde_weight"), "expected a number or \"auto\"");
  } else {
    cfg.pde_weight = 0.0;
  }
  r.finish();

  const Positions colloc = collocation_points(region, n_colloc);
  if (type == "pinn") cfg.collocation = colloc;

  neural::Activation activation;
  try {
    activation = neural::parse_activation(act);
  } catch (const DomainError& e) {
    throw ConfigError(r.path("activation"), e.what());
  }
  const double scale = rms(obs.pressures) > 0.0 ? rms(obs.pressures) : 1.0;
  acoustics::ObservationSet normalized = obs;
  normalized.pressures /= scale;
  const auto init = neural::make_field_model(hidden, activation, region.center(), radius, first_freq, ctx.seed + seed);
  const auto result = neural::pinn_train(normalized, cfg, init);

  auto fitted = std::make_unique<FieldNetEstimator>(result.model, scale);
  fitted->diagnostics.emplace_back("pde_weight", result.pde_weight);
  fitted->diagnostics.emplace_back("j_data_final", result.data_trace.back());
  if (!colloc.empty()) {
    const auto post = neural::pinn_loss(result.model, normalized, colloc, k, 0.0, false, true);
    fitted->diagnostics.emplace_back("j_pde_per_point", post.pde / static_cast<double>(colloc.size()));
  }
  return fitted;
}

std::unique_ptr<FittedEstimator> fit_supervised(ObjectReader& r, const std::string& type, const EstimatorContext& ctx) {
  const auto& scene = *ctx.scene;
  const auto& obs = ctx.observations;
  const double k = obs.wavenumber;
  const double radius = scene.region.circumscribing_radius();
  const bool coeffs = type == "pcnn";

  neural::TrainingScene ts;
  ts.room = scene.room;
  ts.region = scene.region;
  ts.microphones = obs.positions;
  ts.wavenumber = k;
  ts.snr_db = scene.snr_db;
  ts.max_order = r.get_or<int>("max_order", scene.max_order);
  const int count = r.get_or<int>("scenes", 64);
  neural::SupervisedConfig sc;
  sc.hidden = r.get_or<std::vector<int>>("hidden", sc.hidden);
  sc.iterations = r.get_or<int>("iterations", sc.iterations);
  sc.step = r.get_or<double>("step", sc.step);
  sc.seed = ctx.seed + r.get_or<std::uint64_t>("seed", 0);
  int directions = 0;
  double rel_lambda = 0.0;
  if (coeffs) {
    directions = r.get_or<int>("directions", default_basis_count(k, radius));
    rel_lambda = r.get_or<double>("coefficient_lambda", 1e-4);
    ts.target_points = collocation_points(scene.region, r.get_or<int>("target_points", 200));
  } else {
    if (!ctx.eval_points) throw ConfigError(r.where(), "supervised_field needs evaluation points");
    ts.target_points = *ctx.eval_points;
  }
  r.finish();
  if (coeffs) {
    ts.basis = expansion::PlaneWaveBasis{specfun::fibonacci_directions(directions)};
    ts.coefficient_lambda = rel_lambda * static_cast<double>(ts.target_points.size());
  }

  const auto kind = coeffs ? neural::TargetKind::expansion_coeffs : neural::TargetKind::field_samples;
  const auto data = neural::generate_training_set(ts, kind, count, ctx.seed ^ 0xda7a5e7ULL);
  const auto model = neural::supervised_train(data, sc);
  const CVector out = neural::supervised_predict(model, obs.pressures);

  std::unique_ptr<FittedEstimator> fitted;
  if (coeffs) {
    expansion::ExpansionSolution sol;
    sol.coefficients = out;
    fitted = std::make_unique<ExpansionEstimator>(*ts.basis, sol, k);
  } else {
    fitted = std::make_unique<DiscreteEstimator>(ts.target_points, out);
  }
  fitted->diagnostics.emplace_back("training_loss_final", model.loss_trace.back());
  return fitted;
}

}  // namespace

const std::vector<std::string>& estimator_types() {
  static const std::vector<std::string> types{
      "plane_wave_ridge", "spherical_wave_ridge", "equivalent_source_ridge", "plane_wave_lasso",
      "uniform_kernel",   "directional_kernel",   "gaussian_kernel",         "pinn",
      "nn",               "pcnn",                 "supervised_field"};
  return types;
}

std::unique_ptr<FittedEstimator> fit_estimator(const EstimatorConfig& config, const EstimatorContext& ctx) {
  if (!ctx.scene) throw DomainError("estimator context lacks a scene");
  ObjectReader r(config.params, "/estimators/" + config.name);
  const auto& t = config.type;
  if (t == "plane_wave_ridge" || t == "spherical_wave_ridge" || t == "equivalent_source_ridge" ||
      t == "plane_wave_lasso")
    return fit_ridge(r, t, ctx);
  if (t == "uniform_kernel" || t == "directional_kernel" || t == "gaussian_kernel") return fit_kernel(r, t, ctx);
  if (t == "pinn" || t == "nn") return fit_field_net(r, t, ctx);
  if (t == "pcnn" || t == "supervised_field") return fit_supervised(r, t, ctx);
  throw ConfigError("/estimators/" + config.name + "/type", "unknown estimator type '" + t + "'");
}

std::unique_ptr<FittedEstimator> estimator_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  const auto kind = r.get<std::string>("kind");
  if (kind == "expansion") {
    expansion::ExpansionSolution sol;
    const double k = r.get<double>("wavenumber");
    sol.lambda = r.get<double>("lambda");
    auto basis = basis_from_json(r.raw("basis"), r.path("basis"));
    sol.coefficients = cvector_from_json(r.raw("coefficients"), r.path("coefficients"));
    r.finish();
    if (static_cast<Eigen::Index>(expansion::basis_size(basis)) != sol.coefficients.size())
      throw ConfigError(where, "coefficient count does not match basis");
    return std::make_unique<ExpansionEstimator>(std::move(basis), std::move(sol), k);
  }
  if (kind == "kernel") {
    json body = j;
    body.erase("kind");
    return std::make_unique<KernelEstimator>(kernel_solution_from_json(body, where));
  }
  if (kind == "field_model") {
    const double scale = r.get<double>("output_scale");
    auto model = field_model_from_json(r.raw("model"), r.path("model"));
    r.finish();
    return std::make_unique<FieldNetEstimator>(std::move(model), scale);
  }
  if (kind == "discrete") {
    auto pts = positions_from_json(r.raw("points"), r.path("points"));
    auto vals = cvector_from_json(r.raw("values"), r.path("values"));
    r.finish();
    if (static_cast<Eigen::Index>(pts.size()) != vals.size()) throw ConfigError(where, "points/values mismatch");
    return std::make_unique<DiscreteEstimator>(std::move(pts), std::move(vals));
  }
  throw ConfigError(r.path("kind"), "unknown solution kind '" + kind + "'");
}

}  // namespace sfe::harness
