#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sfe/dual.hpp"
#include "sfe/errors.hpp"
#include "sfe/geometry.hpp"

namespace sfe::neural {

enum class Activation { linear, sine, tanh, relu };

const char* activation_name(Activation a);
Activation parse_activation(const std::string& name);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
  Activation activation = Activation::linear;
};

/// Fully connected network with real parameters.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  int input_dim() const;
  int output_dim() const;
  std::vector<int> widths() const;

  std::size_t parameter_count() const;
  /// Flat parameter vector: per layer, weight (column-major) then bias.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& theta);
  bool finite() const;

  template <class T>
  std::vector<T> forward(std::vector<T> x) const;

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

  /// Layer inputs and pre-activations recorded by forward_tape.
  struct Tape {
    std::vector<Eigen::VectorXd> inputs;
    std::vector<Eigen::VectorXd> preactivations;
  };
  Eigen::VectorXd forward_tape(const Eigen::VectorXd& x, Tape& tape) const;
  /// Adds d(loss)/d(theta) to `grad` given d(loss)/d(output).
  void backward(const Tape& tape, const Eigen::VectorXd& output_adjoint, Eigen::VectorXd& grad) const;

 private:
  std::vector<DenseLayer> layers_;
};

template <class T>
T activate(Activation a, const T& z) {
  using std::sin;
  using std::tanh;
  switch (a) {
    case Activation::linear: return z;
    case Activation::sine: return sin(z);
    case Activation::tanh: return tanh(z);
    case Activation::relu: return value_of(z) > 0.0 ? z : T(0.0);
  }
  return z;
}

template <class T>
std::vector<T> Mlp::forward(std::vector<T> x) const {
  for (const auto& layer : layers_) {
    const auto rows = layer.weight.rows();
    const auto cols = layer.weight.cols();
    std::vector<T> next(static_cast<std::size_t>(rows));
    for (Eigen::Index o = 0; o < rows; ++o) {
      T acc(layer.bias[o]);
      for (Eigen::Index i = 0; i < cols; ++i) acc += layer.weight(o, i) * x[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(o)] = activate(layer.activation, acc);
    }
    x = std::move(next);
  }
  return x;
}

/// Implicit field representation r -> (Re, Im). Inputs are mapped to
/// (r - center) / scale before the first layer.
struct MlpModel {
  Mlp net;
  Vec3 center = Vec3::Zero();
  double scale = 1.0;

  void validate() const;
  Vec3 normalize(const Vec3& r) const { return (r - center) / scale; }
};

/// Deterministic random initialization of a 3 -> hidden... -> 2 field model.
/// Sine layers follow the implicit-representation scheme with the first layer
/// drawn from U(-w, w), w = first_layer_frequency (in normalized coordinates).
MlpModel make_field_model(const std::vector<int>& hidden, Activation hidden_activation, const Vec3& center,
                          double scale, double first_layer_frequency, std::uint64_t seed);

/// Default 3 -> 8 -> 8 -> 5 -> 2 sine network.
inline const std::vector<int> kDefaultHidden{8, 8, 5};

cplx mlp_forward(const MlpModel& model, const Vec3& r);

/// Laplacian in physical coordinates, by nested forward-mode differentiation
/// (one second-order dual pass per axis).
cplx mlp_laplacian(const MlpModel& model, const Vec3& r);

/// Adaptive-moment optimizer over a flat parameter vector.
class Adam {
 public:
  explicit Adam(double step = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
      : step_(step), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  void update(Eigen::VectorXd& theta, const Eigen::VectorXd& grad);

 private:
  double step_, beta1_, beta2_, epsilon_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

}  // namespace sfe::neural
