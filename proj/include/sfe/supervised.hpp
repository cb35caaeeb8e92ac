#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sfe/acoustics.hpp"
#include "sfe/expansion.hpp"
#include "sfe/mlp.hpp"

namespace sfe::neural {

enum class TargetKind { field_samples, expansion_coeffs };

const char* target_kind_name(TargetKind k);

/// Observation/target pairs sharing one microphone and target geometry.
struct SupervisedDataset {
  TargetKind kind = TargetKind::field_samples;
  double wavenumber = 0.0;
  Positions microphones;
  Positions target_points;                  // where field samples live (and are fitted from)
  std::optional<expansion::BasisSpec> basis;  // expansion_coeffs only
  std::vector<CVector> inputs;
  std::vector<CVector> targets;

  void validate() const;
  std::size_t size() const { return inputs.size(); }
};

/// Simulation template for generate_training_set. Sources are drawn uniformly
/// from the room shrunk by `wall_margin`, rejecting draws closer than
/// `region_clearance` to the region's circumscribing ball.
struct TrainingScene {
  acoustics::RoomSpec room;
  acoustics::RegionSpec region{acoustics::Ball{}};
  Positions microphones;
  Positions target_points;
  std::optional<expansion::BasisSpec> basis;
  double wavenumber = 1.0;
  int max_order = 0;
  double snr_db = acoustics::kNoNoise;
  double wall_margin = 0.2;
  double region_clearance = 0.1;
  double coefficient_lambda = 1e-6;
};

SupervisedDataset generate_training_set(const TrainingScene& scene, TargetKind kind, int count, std::uint64_t seed);

struct SupervisedConfig {
  std::vector<int> hidden{64, 64};
  Activation activation = Activation::tanh;
  double step = 1e-3;
  int iterations = 2000;
  std::uint64_t seed = 1;
};

/// Network y -> t on stacked real/imaginary parts, with scalar input/output scaling.
struct SupervisedModel {
  Mlp net;
  TargetKind kind = TargetKind::field_samples;
  double input_scale = 1.0;
  double output_scale = 1.0;
  std::vector<double> loss_trace;  // sum_d |t_d - g(y_d)|^2 per iteration
};

/// Xavier-initialized dense network.
Mlp make_mlp(const std::vector<int>& widths, Activation hidden, Activation output, std::uint64_t seed);

SupervisedModel supervised_train(const SupervisedDataset& data, const SupervisedConfig& config);

CVector supervised_predict(const SupervisedModel& model, const CVector& observation);

}  // namespace sfe::neural
