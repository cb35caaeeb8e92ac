#include "sfe/mlp.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace sfe::neural {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::linear: return "linear";
    case Activation::sine: return "sine";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
  }
  return "unknown";
}

Activation parse_activation(const std::string& name) {
  if (name == "linear") return Activation::linear;
  if (name == "sine") return Activation::sine;
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  throw DomainError("unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw DomainError("network needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.bias.size() != l.weight.rows()) throw DomainError("layer bias length must equal its output width");
    if (i > 0 && l.weight.cols() != layers_[i - 1].weight.rows())
      throw DomainError("consecutive layer widths do not chain");
  }
}

int Mlp::input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols()); }

int Mlp::output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows()); }

std::vector<int> Mlp::widths() const {
  std::vector<int> w{input_dim()};
  for (const auto& l : layers_) w.push_back(static_cast<int>(l.weight.rows()));
  return w;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Eigen::VectorXd Mlp::parameters() const {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  for (const auto& l : layers_) {
    theta.segment(at, l.weight.size()) = l.weight.reshaped();
    at += l.weight.size();
    theta.segment(at, l.bias.size()) = l.bias;
    at += l.bias.size();
  }
  return theta;
}

void Mlp::set_parameters(const Eigen::VectorXd& theta) {
  if (theta.size() != static_cast<Eigen::Index>(parameter_count())) throw DomainError("parameter vector length mismatch");
  Eigen::Index at = 0;
  for (auto& l : layers_) {
    l.weight.reshaped() = theta.segment(at, l.weight.size());
    at += l.weight.size();
    l.bias = theta.segment(at, l.bias.size());
    at += l.bias.size();
  }
}

bool Mlp::finite() const {
  for (const auto& l : layers_)
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd h = x;
  for (const auto& l : layers_) {
    Eigen::VectorXd z = l.weight * h + l.bias;
    for (auto& v : z) v = activate(l.activation, v);
    h = std::move(z);
  }
  return h;
}

Eigen::VectorXd Mlp::forward_tape(const Eigen::VectorXd& x, Tape& tape) const {
  tape.inputs.clear();
  tape.preactivations.clear();
  Eigen::VectorXd h = x;
  for (const auto& l : layers_) {
    tape.inputs.push_back(h);
    Eigen::VectorXd z = l.weight * h + l.bias;
    tape.preactivations.push_back(z);
    for (auto& v : z) v = activate(l.activation, v);
    h = std::move(z);
  }
  return h;
}

namespace {

double activation_slope(Activation a, double z) {
  switch (a) {
    case Activation::linear: return 1.0;
    case Activation::sine: return std::cos(z);
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

}  // namespace

void Mlp::backward(const Tape& tape, const Eigen::VectorXd& output_adjoint, Eigen::VectorXd& grad) const {
  std::vector<Eigen::Index> offset;
  Eigen::Index at = 0;
  for (const auto& l : layers_) {
    offset.push_back(at);
    at += l.weight.size() + l.bias.size();
  }
  Eigen::VectorXd adj = output_adjoint;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& l = layers_[li];
    Eigen::VectorXd zbar = adj;
    for (Eigen::Index i = 0; i < zbar.size(); ++i) zbar[i] *= activation_slope(l.activation, tape.preactivations[li][i]);
    Eigen::Map<Eigen::MatrixXd> wbar(grad.data() + offset[li], l.weight.rows(), l.weight.cols());
    wbar.noalias() += zbar * tape.inputs[li].transpose();
    grad.segment(offset[li] + l.weight.size(), zbar.size()) += zbar;
    if (li > 0) adj = l.weight.transpose() * zbar;
  }
}

void MlpModel::validate() const {
  if (net.input_dim() != 3 || net.output_dim() != 2) throw DomainError("field model must map 3 inputs to 2 outputs");
  if (!(scale > 0.0) || !center.allFinite()) throw DomainError("field model normalization is invalid");
  if (!net.finite()) throw ModelCorruptError("field model has non-finite parameters");
}

MlpModel make_field_model(const std::vector<int>& hidden, Activation hidden_activation, const Vec3& center,
                          double scale, double first_layer_frequency, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double a) { return std::uniform_real_distribution<double>(-a, a)(rng); };

  std::vector<int> widths{3};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(2);

  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const int in = widths[i];
    const int out = widths[i + 1];
    const bool first = i == 0;
    const bool last = i + 2 == widths.size();
    DenseLayer l{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out),
                 last ? Activation::linear : hidden_activation};
    double a = std::sqrt(6.0 / (in + (hidden_activation == Activation::sine ? 0 : out)));
    if (first && hidden_activation == Activation::sine) a = first_layer_frequency;
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) l.weight(r, c) = uniform(a);
    if (first && hidden_activation == Activation::sine)
      for (auto& b : l.bias) b = uniform(std::numbers::pi);
    layers.push_back(std::move(l));
  }
  MlpModel model{Mlp(std::move(layers)), center, scale};
  model.validate();
  return model;
}

cplx mlp_forward(const MlpModel& model, const Vec3& r) {
  if (!model.net.finite()) throw ModelCorruptError("field model has non-finite parameters");
  if (!r.allFinite()) throw DomainError("field model input must be finite");
  const Vec3 x = model.normalize(r);
  const auto out = model.net.forward(std::vector<double>{x.x(), x.y(), x.z()});
  return {out[0], out[1]};
}

cplx mlp_laplacian(const MlpModel& model, const Vec3& r) {
  for (const auto& l : model.net.layers())
    if (l.activation == Activation::relu) throw UnsupportedError("Laplacian through a ReLU layer is undefined");
  if (!model.net.finite()) throw ModelCorruptError("field model has non-finite parameters");
  using D2 = Dual<Dual<double>>;
  const Vec3 x = model.normalize(r);
  const double seed = 1.0 / model.scale;
  double re = 0.0, im = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<D2> in(3);
    for (int i = 0; i < 3; ++i) {
      const double s = i == axis ? seed : 0.0;
      in[static_cast<std::size_t>(i)] = D2(Dual<double>(x[i], s), Dual<double>(s, 0.0));
    }
    const auto out = model.net.forward(std::move(in));
    re += out[0].d.d;
    im += out[1].d.d;
  }
  return {re, im};
}

void Adam::update(Eigen::VectorXd& theta, const Eigen::VectorXd& grad) {
  if (m_.size() != theta.size()) {
    m_ = Eigen::VectorXd::Zero(theta.size());
    v_ = Eigen::VectorXd::Zero(theta.size());
    t_ = 0;
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  theta.array() -= step_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + epsilon_);
}

}  // namespace sfe::neural
