#pragma once

#include <json.hpp>

#include "sfe/expansion.hpp"
#include "sfe/kernel.hpp"
#include "sfe/mlp.hpp"

namespace sfe::harness {

using json = nlohmann::json;

json vec3_to_json(const Vec3& v);
Vec3 vec3_from_json(const json& j, const std::string& where);
json positions_to_json(const Positions& pts);
Positions positions_from_json(const json& j, const std::string& where);
/// [[re, im], ...]
json cvector_to_json(const CVector& v);
CVector cvector_from_json(const json& j, const std::string& where);

json basis_to_json(const expansion::BasisSpec& spec);
expansion::BasisSpec basis_from_json(const json& j, const std::string& where);

/// Fitted kernel estimator: family, k, parameters, positions, weights.
json kernel_solution_to_json(const kernel::KernelSolution& sol);
kernel::KernelSolution kernel_solution_from_json(const json& j, const std::string& where);

/// Checkpoint: widths, activation tags, normalization, weights (column-major) and biases.
json field_model_to_json(const neural::MlpModel& model);
neural::MlpModel field_model_from_json(const json& j, const std::string& where);

}  // namespace sfe::harness
