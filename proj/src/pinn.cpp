#include "sfe/pinn.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "sfe/util.hpp"

namespace sfe::neural {

namespace {

struct ActivationDerivs {
  double f, d1, d2, d3;
};

ActivationDerivs derivs(Activation a, double z) {
  switch (a) {
    case Activation::linear: return {z, 1.0, 0.0, 0.0};
    case Activation::sine: {
      const double s = std::sin(z), c = std::cos(z);
      return {s, c, -s, -c};
    }
    case Activation::tanh: {
      const double t = std::tanh(z), u = 1.0 - t * t;
      return {t, u, -2.0 * t * u, (-2.0 + 6.0 * t * t) * u};
    }
    case Activation::relu: return {z > 0.0 ? z : 0.0, z > 0.0 ? 1.0 : 0.0, 0.0, 0.0};
  }
  return {z, 1.0, 0.0, 0.0};
}

using Vec = Eigen::VectorXd;

/// Value plus first and second derivative channels along each input axis.
struct Jet {
  Vec v;
  std::array<Vec, 3> d;
  std::array<Vec, 3> dd;
};

struct LayerTape {
  Jet in;
  Jet z;
};

/// Forward pass that records per-layer inputs and pre-activations.
/// `second` controls whether derivative channels are propagated.
Jet forward_tape(const Mlp& net, const MlpModel& model, const Vec3& r, bool second, std::vector<LayerTape>& tape) {
  Jet h;
  h.v = model.normalize(r);
  if (second)
    for (int a = 0; a < 3; ++a) {
      h.d[a] = Vec::Zero(3);
      h.d[a][a] = 1.0 / model.scale;
      h.dd[a] = Vec::Zero(3);
    }
  tape.clear();
  for (const auto& layer : net.layers()) {
    LayerTape t;
    t.in = h;
    t.z.v = layer.weight * h.v + layer.bias;
    Jet out;
    out.v.resize(t.z.v.size());
    if (second)
      for (int a = 0; a < 3; ++a) {
        t.z.d[a] = layer.weight * h.d[a];
        t.z.dd[a] = layer.weight * h.dd[a];
        out.d[a].resize(t.z.v.size());
        out.dd[a].resize(t.z.v.size());
      }
    for (Eigen::Index i = 0; i < t.z.v.size(); ++i) {
      const auto ad = derivs(layer.activation, t.z.v[i]);
      out.v[i] = ad.f;
      if (second)
        for (int a = 0; a < 3; ++a) {
          const double zd = t.z.d[a][i];
          out.d[a][i] = ad.d1 * zd;
          out.dd[a][i] = ad.d2 * zd * zd + ad.d1 * t.z.dd[a][i];
        }
    }
    tape.push_back(std::move(t));
    h = std::move(out);
  }
  return h;
}

/// Reverse sweep through the recorded jets, accumulating parameter adjoints.
void backward_tape(const Mlp& net, const std::vector<LayerTape>& tape, Jet adj, bool second, Vec& grad) {
  // Offsets of each layer's block in the flat parameter vector.
  std::vector<Eigen::Index> offset;
  Eigen::Index at = 0;
  for (const auto& l : net.layers()) {
    offset.push_back(at);
    at += l.weight.size() + l.bias.size();
  }
  for (std::size_t li = net.layers().size(); li-- > 0;) {
    const auto& layer = net.layers()[li];
    const auto& t = tape[li];
    const auto n = t.z.v.size();
    Jet zbar;
    zbar.v = Vec::Zero(n);
    if (second)
      for (int a = 0; a < 3; ++a) {
        zbar.d[a] = Vec::Zero(n);
        zbar.dd[a] = Vec::Zero(n);
      }
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ad = derivs(layer.activation, t.z.v[i]);
      double zb = adj.v[i] * ad.d1;
      if (second)
        for (int a = 0; a < 3; ++a) {
          const double zd = t.z.d[a][i];
          zb += adj.d[a][i] * ad.d2 * zd + adj.dd[a][i] * (ad.d3 * zd * zd + ad.d2 * t.z.dd[a][i]);
          zbar.d[a][i] = adj.d[a][i] * ad.d1 + adj.dd[a][i] * 2.0 * ad.d2 * zd;
          zbar.dd[a][i] = adj.dd[a][i] * ad.d1;
        }
      zbar.v[i] = zb;
    }
    Eigen::Map<Eigen::MatrixXd> wbar(grad.data() + offset[li], layer.weight.rows(), layer.weight.cols());
    wbar.noalias() += zbar.v * t.in.v.transpose();
    if (second)
      for (int a = 0; a < 3; ++a) {
        wbar.noalias() += zbar.d[a] * t.in.d[a].transpose();
        wbar.noalias() += zbar.dd[a] * t.in.dd[a].transpose();
      }
    grad.segment(offset[li] + layer.weight.size(), n) += zbar.v;
    if (li == 0) break;
    Jet next;
    next.v = layer.weight.transpose() * zbar.v;
    if (second)
      for (int a = 0; a < 3; ++a) {
        next.d[a] = layer.weight.transpose() * zbar.d[a];
        next.dd[a] = layer.weight.transpose() * zbar.dd[a];
      }
    adj = std::move(next);
  }
}

}  // namespace

void PinnConfig::validate() const {
  if (!(wavenumber > 0.0)) throw DomainError("PINN wavenumber must be positive");
  if (pde_weight && !(*pde_weight >= 0.0)) throw DomainError("PDE weight must be >= 0");
  if (!(step > 0.0)) throw DomainError("optimizer step must be positive");
  if (iterations < 0) throw DomainError("iteration count must be >= 0");
}

PinnLoss pinn_loss(const MlpModel& model, const acoustics::ObservationSet& obs, const Positions& collocation,
                   double k, double weight, bool need_gradient, bool need_pde) {
  const Mlp& net = model.net;
  PinnLoss loss;
  if (need_gradient) loss.gradient = Vec::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  std::vector<LayerTape> tape;

  for (std::size_t m = 0; m < obs.positions.size(); ++m) {
    const Jet out = forward_tape(net, model, obs.positions[m], false, tape);
    const cplx s = obs.pressures[static_cast<Eigen::Index>(m)];
    const double er = out.v[0] - s.real();
    const double ei = out.v[1] - s.imag();
    loss.data += er * er + ei * ei;
    if (need_gradient) {
      Jet adj;
      adj.v = Vec(2);
      adj.v << 2.0 * er, 2.0 * ei;
      backward_tape(net, tape, std::move(adj), false, loss.gradient);
    }
  }

  if (!(weight > 0.0) && !need_pde) return loss;
  const double k2 = k * k;
  for (const auto& r : collocation) {
    const Jet out = forward_tape(net, model, r, true, tape);
    double res[2];
    for (int c = 0; c < 2; ++c) res[c] = out.dd[0][c] + out.dd[1][c] + out.dd[2][c] + k2 * out.v[c];
    loss.pde += res[0] * res[0] + res[1] * res[1];
    if (need_gradient && weight > 0.0) {
      Jet adj;
      adj.v = Vec(2);
      adj.v << 2.0 * weight * res[0] * k2, 2.0 * weight * res[1] * k2;
      for (int a = 0; a < 3; ++a) {
        adj.d[a] = Vec::Zero(2);
        adj.dd[a] = Vec(2);
        adj.dd[a] << 2.0 * weight * res[0], 2.0 * weight * res[1];
      }
      backward_tape(net, tape, std::move(adj), true, loss.gradient);
    }
  }
  return loss;
}

PinnResult pinn_train(const acoustics::ObservationSet& obs, const PinnConfig& config, const MlpModel& init) {
  config.validate();
  obs.validate();
  init.validate();
  if (config.pde_weight.value_or(1.0) > 0.0)
    for (const auto& l : init.net.layers())
      if (l.activation == Activation::relu) throw UnsupportedError("PDE loss requires twice-differentiable activations");

  PinnResult result{init, 0.0, {}, {}, 0};
  const double k = config.wavenumber;
  const std::size_t per_pass = config.collocation.size();

  double weight = config.pde_weight.value_or(0.0);
  if (!config.pde_weight) {
    const auto l0 = pinn_loss(init, obs, config.collocation, k, 0.0, false, true);
    result.laplacian_evaluations += per_pass;
    weight = (l0.pde > 0.0 && l0.data > 0.0) ? 1e-2 * l0.data / l0.pde : 1.0;
  }
  result.pde_weight = weight;
  const bool with_pde = weight > 0.0;

  Adam adam(config.step);
  Eigen::VectorXd theta = init.net.parameters();
  MlpModel current = init;
  for (int it = 0; it <= config.iterations; ++it) {
    const bool last = it == config.iterations;
    const auto loss = pinn_loss(current, obs, config.collocation, k, weight, !last, false);
    if (with_pde) result.laplacian_evaluations += per_pass;
    const double total = loss.data + weight * loss.pde;
    if (!std::isfinite(total) || (!last && !loss.gradient.allFinite()))
      throw TrainingDivergedError("PINN training diverged at iteration " + std::to_string(it), result.model);
    result.data_trace.push_back(loss.data);
    result.pde_trace.push_back(with_pde ? loss.pde : std::numeric_limits<double>::quiet_NaN());
    result.model = current;
    if (last) break;
    adam.update(theta, loss.gradient);
    current.net.set_parameters(theta);
  }
  return result;
}

void write_loss_trace_csv(std::ostream& os, const PinnResult& result) {
  os << "iteration,J_data,J_PDE\n";
  for (std::size_t i = 0; i < result.data_trace.size(); ++i)
    os << i << ',' << fmt_double(result.data_trace[i]) << ',' << fmt_double(result.pde_trace[i]) << '\n';
}

}  // namespace sfe::neural
