#include "sfe/supervised.hpp"

#include <cmath>
#include <random>

#include "sfe/errors.hpp"

namespace sfe::neural {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::VectorXd stack(const CVector& c) {
  Eigen::VectorXd out(2 * c.size());
  out << c.real(), c.imag();
  return out;
}

CVector unstack(const Eigen::VectorXd& v) {
  const auto n = v.size() / 2;
  CVector out(n);
  out.real() = v.head(n);
  out.imag() = v.tail(n);
  return out;
}

double rms(const std::vector<CVector>& xs) {
  double acc = 0.0;
  Eigen::Index n = 0;
  for (const auto& x : xs) {
    acc += x.squaredNorm();
    n += x.size();
  }
  return n > 0 ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
}

}  // namespace

const char* target_kind_name(TargetKind k) {
  return k == TargetKind::field_samples ? "field_samples" : "expansion_coeffs";
}

void SupervisedDataset::validate() const {
  if (inputs.empty()) throw DomainError("supervised dataset must hold at least one pair");
  if (inputs.size() != targets.size()) throw DomainError("supervised dataset inputs and targets differ in count");
  const auto in = inputs.front().size();
  const auto out = targets.front().size();
  for (std::size_t d = 0; d < inputs.size(); ++d)
    if (inputs[d].size() != in || targets[d].size() != out)
      throw DomainError("supervised pair " + std::to_string(d) + " has inconsistent shape");
  if (kind == TargetKind::expansion_coeffs && (!basis || static_cast<Eigen::Index>(expansion::basis_size(*basis)) != out))
    throw DomainError("coefficient targets need a basis of matching size");
}

SupervisedDataset generate_training_set(const TrainingScene& scene, TargetKind kind, int count, std::uint64_t seed) {
  if (count < 1) throw DomainError("training set size must be >= 1");
  scene.room.validate();
  scene.region.validate();
  if (scene.microphones.empty()) throw DomainError("training scene has no microphones");
  if (scene.target_points.empty()) throw DomainError("training scene has no target points");
  if (kind == TargetKind::expansion_coeffs && !scene.basis) throw DomainError("coefficient targets need a basis");

  SupervisedDataset data;
  data.kind = kind;
  data.wavenumber = scene.wavenumber;
  data.microphones = scene.microphones;
  data.target_points = scene.target_points;
  data.basis = scene.basis;

  std::optional<expansion::Dictionary> dict;
  if (kind == TargetKind::expansion_coeffs)
    dict = expansion::build_dictionary(*scene.basis, scene.target_points, scene.wavenumber);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vec3 lo = Vec3::Constant(scene.wall_margin);
  const Vec3 span = scene.room.dimensions - 2.0 * lo;
  if ((span.array() <= 0.0).any()) throw DomainError("wall margin leaves no room for sources");
  const double keep_out = scene.region.circumscribing_radius() + scene.region_clearance;

  for (int d = 0; d < count; ++d) {
    Vec3 src;
    int rejections = 0;
    for (;;) {
      src = lo + Vec3(unit(rng), unit(rng), unit(rng)).cwiseProduct(span);
      if ((src - scene.region.center()).norm() > keep_out) break;
      if (++rejections >= 100) throw InfeasibleError("could not place a source outside the region after 100 draws");
    }
    const acoustics::ImageSourceModel ism(scene.room, src, scene.max_order);
    acoustics::ObservationSet obs{scene.wavenumber, scene.microphones, ism.pressures(scene.microphones, scene.wavenumber)};
    obs = acoustics::add_noise(obs, scene.snr_db, splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(d))));
    const CVector field = ism.pressures(scene.target_points, scene.wavenumber);
    data.inputs.push_back(obs.pressures);
    if (kind == TargetKind::field_samples)
      data.targets.push_back(field);
    else
      data.targets.push_back(expansion::ridge_solve(*dict, field, scene.coefficient_lambda).coefficients);
  }
  return data;
}

Mlp make_mlp(const std::vector<int>& widths, Activation hidden, Activation output, std::uint64_t seed) {
  if (widths.size() < 2) throw DomainError("network needs input and output widths");
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const int in = widths[i], out = widths[i + 1];
    if (in < 1 || out < 1) throw DomainError("layer widths must be >= 1");
    const double a = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> u(-a, a);
    DenseLayer l{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out), i + 2 == widths.size() ? output : hidden};
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) l.weight(r, c) = u(rng);
    layers.push_back(std::move(l));
  }
  return Mlp(std::move(layers));
}

SupervisedModel supervised_train(const SupervisedDataset& data, const SupervisedConfig& config) {
  data.validate();
  if (config.iterations < 0 || !(config.step > 0.0)) throw DomainError("invalid optimizer settings");

  SupervisedModel model;
  model.kind = data.kind;
  model.input_scale = rms(data.inputs);
  model.output_scale = rms(data.targets);
  if (!(model.input_scale > 0.0)) model.input_scale = 1.0;
  if (!(model.output_scale > 0.0)) model.output_scale = 1.0;

  std::vector<int> widths{static_cast<int>(2 * data.inputs.front().size())};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(static_cast<int>(2 * data.targets.front().size()));
  model.net = make_mlp(widths, config.activation, Activation::linear, config.seed);

  std::vector<Eigen::VectorXd> xs, ts;
  for (std::size_t d = 0; d < data.size(); ++d) {
    xs.push_back(stack(data.inputs[d]) / model.input_scale);
    ts.push_back(stack(data.targets[d]) / model.output_scale);
  }

  const double unscale = model.output_scale * model.output_scale;
  Adam adam(config.step);
  Eigen::VectorXd theta = model.net.parameters();
  Mlp::Tape tape;
  for (int it = 0; it <= config.iterations; ++it) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
    double loss = 0.0;
    for (std::size_t d = 0; d < xs.size(); ++d) {
      const Eigen::VectorXd err = model.net.forward_tape(xs[d], tape) - ts[d];
      loss += err.squaredNorm();
      if (it < config.iterations) model.net.backward(tape, 2.0 * err, grad);
    }
    if (!std::isfinite(loss)) throw ModelCorruptError("supervised training diverged");
    model.loss_trace.push_back(loss * unscale);
    if (it == config.iterations) break;
    adam.update(theta, grad);
    model.net.set_parameters(theta);
  }
  return model;
}

CVector supervised_predict(const SupervisedModel& model, const CVector& observation) {
  if (2 * observation.size() != model.net.input_dim()) throw DomainError("observation length does not match network");
  return unstack(model.net.forward(stack(observation) / model.input_scale)) * model.output_scale;
}

}  // namespace sfe::neural
