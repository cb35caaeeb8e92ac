#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sfe/acoustics.hpp"
#include "sfe/mlp.hpp"

namespace sfe::neural {

struct PinnConfig {
  double wavenumber = 1.0;
  /// PDE weight epsilon; unset means 1e-2 * J_data / J_PDE at initialization.
  std::optional<double> pde_weight;
  Positions collocation;  // may overlap the microphones
  double step = 1e-3;
  int iterations = 5000;

  void validate() const;
};

/// Squared-error losses of the implicit field model and their gradient.
struct PinnLoss {
  double data = 0.0;  // sum_m |s_m - g(r_m)|^2
  double pde = 0.0;   // sum_n |(lap + k^2) g(r_n)|^2
  Eigen::VectorXd gradient;  // of data + weight * pde, flat parameter layout
};

/// J_data, J_PDE and (optionally) d(J_data + weight J_PDE)/d theta. The
/// Laplacian is skipped entirely when `weight` is zero and `need_pde` is false.
PinnLoss pinn_loss(const MlpModel& model, const acoustics::ObservationSet& obs, const Positions& collocation,
                   double k, double weight, bool need_gradient, bool need_pde);

struct PinnResult {
  MlpModel model;
  double pde_weight = 0.0;
  std::vector<double> data_trace;  // entry i: loss after i updates
  std::vector<double> pde_trace;   // NaN when the PDE term is disabled
  std::size_t laplacian_evaluations = 0;
};

class TrainingDivergedError : public Error {
 public:
  TrainingDivergedError(const std::string& what, MlpModel last_finite)
      : Error(what), last_finite_(std::move(last_finite)) {}
  const MlpModel& last_finite() const noexcept { return last_finite_; }

 private:
  MlpModel last_finite_;
};

/// Full-batch Adam on J_data + epsilon J_PDE. epsilon == 0 is the plain
/// data-only network and never touches the Laplacian.
PinnResult pinn_train(const acoustics::ObservationSet& obs, const PinnConfig& config, const MlpModel& init);

/// CSV with header iteration,J_data,J_PDE.
void write_loss_trace_csv(std::ostream& os, const PinnResult& result);

}  // namespace sfe::neural
