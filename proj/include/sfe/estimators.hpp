#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sfe/acoustics.hpp"
#include "sfe/config.hpp"

namespace sfe::harness {

/// A fitted sound field estimator that can be evaluated anywhere in the region.
class FittedEstimator {
 public:
  virtual ~FittedEstimator() = default;

  virtual CVector predict(const Positions& points) const = 0;
  /// Serialized form, re-loadable with estimator_from_json.
  virtual nlohmann::json to_json() const = 0;
  /// True when every prediction solves the Helmholtz equation exactly.
  virtual bool helmholtz_exact() const = 0;

  std::vector<std::pair<std::string, double>> diagnostics;
};

struct EstimatorContext {
  const Scene* scene = nullptr;
  acoustics::ObservationSet observations;
  double frequency_hz = 0.0;
  std::uint64_t seed = 0;
  const Positions* eval_points = nullptr;  // required by discretized estimators
};

/// Names accepted in EstimatorConfig::type.
const std::vector<std::string>& estimator_types();

/// Fits one estimator. Parameters unknown to the type are rejected.
std::unique_ptr<FittedEstimator> fit_estimator(const EstimatorConfig& config, const EstimatorContext& ctx);

/// Inverse of FittedEstimator::to_json.
std::unique_ptr<FittedEstimator> estimator_from_json(const nlohmann::json& j, const std::string& where = "");

}  // namespace sfe::harness
