#pragma once

#include <string>
#include <vector>

#include "sfe/acoustics.hpp"
#include "sfe/geometry.hpp"

namespace sfe::kernel {

enum class KernelFamily { uniform_helmholtz, directional_helmholtz, gaussian_baseline };

const char* family_name(KernelFamily f);
KernelFamily parse_family(const std::string& name);

struct KernelSpec {
  KernelFamily family = KernelFamily::uniform_helmholtz;
  double wavenumber = 1.0;
  Direction peak{0.0, 0.0, 1.0};  // directional family only
  double sharpness = 0.0;         // beta, directional family only
  double width = 1.0;             // sigma, gaussian family only

  static KernelSpec uniform(double k);
  /// `peak` enters as in (k d - j beta xi)^T (k d - j beta xi); under the
  /// e^{-j omega t} convention it emphasizes waves travelling along `peak`.
  static KernelSpec directional(double k, const Direction& peak, double beta);
  /// exp(-sigma^2 |d|^2); sigma defaults to k.
  static KernelSpec gaussian(double k, double sigma);
  static KernelSpec gaussian(double k) { return gaussian(k, k); }

  void validate() const;
};

cplx kernel_value(const KernelSpec& spec, const Vec3& r, const Vec3& rp);

struct GramDiagnostics {
  bool duplicate_positions = false;
};

/// Hermitian Gram matrix; the lower triangle is the conjugate of the upper.
CMatrix gram_matrix(const KernelSpec& spec, const Positions& positions, GramDiagnostics* diag = nullptr);

struct KernelSolution {
  KernelSpec spec;
  Positions positions;
  CVector weights;  // alpha
  double lambda = 0.0;
};

/// 1e-3 * trace(K) / M.
double default_lambda(const CMatrix& gram);

/// alpha = (K + lambda I)^{-1} y.
KernelSolution kernel_fit(const KernelSpec& spec, const acoustics::ObservationSet& obs, double lambda);

/// Leave-one-out selection of lambda over `candidates` (closed form per candidate).
double select_lambda_loo(const KernelSpec& spec, const acoustics::ObservationSet& obs,
                         const std::vector<double>& candidates);

/// sum_i alpha_i kappa(x, x_i) at every query point.
CVector kernel_predict(const KernelSolution& sol, const Positions& points);

}  // namespace sfe::kernel
