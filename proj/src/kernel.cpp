#include "sfe/kernel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "sfe/errors.hpp"
#include "sfe/specfun.hpp"

namespace sfe::kernel {

const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::uniform_helmholtz: return "uniform_helmholtz";
    case KernelFamily::directional_helmholtz: return "directional_helmholtz";
    case KernelFamily::gaussian_baseline: return "gaussian_baseline";
  }
  return "unknown";
}

KernelFamily parse_family(const std::string& name) {
  if (name == "uniform_helmholtz") return KernelFamily::uniform_helmholtz;
  if (name == "directional_helmholtz") return KernelFamily::directional_helmholtz;
  if (name == "gaussian_baseline") return KernelFamily::gaussian_baseline;
  throw DomainError("unknown kernel family '" + name + "'");
}

KernelSpec KernelSpec::uniform(double k) {
  KernelSpec s;
  s.wavenumber = k;
  s.validate();
  return s;
}

KernelSpec KernelSpec::directional(double k, const Direction& peak, double beta) {
  KernelSpec s;
  s.family = KernelFamily::directional_helmholtz;
  s.wavenumber = k;
  s.peak = peak;
  s.sharpness = beta;
  s.validate();
  return s;
}

KernelSpec KernelSpec::gaussian(double k, double sigma) {
  KernelSpec s;
  s.family = KernelFamily::gaussian_baseline;
  s.wavenumber = k;
  s.width = sigma;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  if (!(wavenumber > 0.0) || !std::isfinite(wavenumber)) throw DomainError("kernel wavenumber must be positive");
  if (!(sharpness >= 0.0) || !std::isfinite(sharpness)) throw DomainError("kernel sharpness must be >= 0");
  if (family == KernelFamily::gaussian_baseline && !(width > 0.0)) throw DomainError("gaussian width must be > 0");
}

cplx kernel_value(const KernelSpec& spec, const Vec3& r, const Vec3& rp) {
  const Vec3 d = r - rp;
  const double k = spec.wavenumber;
  switch (spec.family) {
    case KernelFamily::uniform_helmholtz: {
      const double x = k * d.norm();
      return x == 0.0 ? 1.0 : std::sin(x) / x;
    }
    case KernelFamily::directional_helmholtz: {
      const double beta = spec.sharpness;
      const cplx z2(k * k * d.squaredNorm() - beta * beta, -2.0 * beta * k * spec.peak.vec().dot(d));
      return specfun::j0_complex(z2) / specfun::vmf_normalization(beta);
    }
    case KernelFamily::gaussian_baseline:
      return std::exp(-spec.width * spec.width * d.squaredNorm());
  }
  return 0.0;
}

CMatrix gram_matrix(const KernelSpec& spec, const Positions& positions, GramDiagnostics* diag) {
  const auto m = static_cast<Eigen::Index>(positions.size());
  CMatrix gram(m, m);
  bool dup = false;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const auto& ri = positions[static_cast<std::size_t>(i)];
      const auto& rj = positions[static_cast<std::size_t>(j)];
      if (j > i && (ri - rj).norm() <= 1e-9) dup = true;
      gram(i, j) = kernel_value(spec, ri, rj);
      gram(j, i) = std::conj(gram(i, j));
    }
    gram(i, i) = gram(i, i).real();
  }
  if (diag) diag->duplicate_positions = dup;
  return gram;
}

double default_lambda(const CMatrix& gram) {
  if (gram.rows() == 0) throw DomainError("empty Gram matrix");
  return 1e-3 * gram.trace().real() / static_cast<double>(gram.rows());
}

namespace {

Eigen::LLT<CMatrix> factor(const CMatrix& gram, double lambda) {
  CMatrix a = gram;
  a.diagonal().array() += lambda;
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success) throw IllPosedError("K + lambda I is not positive definite");
  return llt;
}

}  // namespace

KernelSolution kernel_fit(const KernelSpec& spec, const acoustics::ObservationSet& obs, double lambda) {
  spec.validate();
  obs.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("kernel ridge lambda must be positive");
  if (!obs.pressures.allFinite()) throw DomainError("observations must be finite");
  const CMatrix gram = gram_matrix(spec, obs.positions);
  KernelSolution sol{spec, obs.positions, factor(gram, lambda).solve(obs.pressures), lambda};
  return sol;
}

double select_lambda_loo(const KernelSpec& spec, const acoustics::ObservationSet& obs,
                         const std::vector<double>& candidates) {
  if (candidates.empty()) throw DomainError("no lambda candidates");
  obs.validate();
  const CMatrix gram = gram_matrix(spec, obs.positions);
  const auto m = gram.rows();
  double best = candidates.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (double lambda : candidates) {
    if (!(lambda > 0.0)) throw DomainError("lambda candidates must be positive");
    const auto llt = factor(gram, lambda);
    const CMatrix inv = llt.solve(CMatrix::Identity(m, m));
    const CVector alpha = inv * obs.pressures;
    // Held-out residual at mic i is alpha_i / [(K + lambda I)^{-1}]_ii.
    double err = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) err += std::norm(alpha[i] / inv(i, i));
    if (err < best_err) {
      best_err = err;
      best = lambda;
    }
  }
  return best;
}

CVector kernel_predict(const KernelSolution& sol, const Positions& points) {
  if (static_cast<Eigen::Index>(sol.positions.size()) != sol.weights.size())
    throw DomainError("kernel solution positions and weights differ in length");
  CVector out(static_cast<Eigen::Index>(points.size()));
  for (std::size_t q = 0; q < points.size(); ++q) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < sol.positions.size(); ++i)
      acc += sol.weights[static_cast<Eigen::Index>(i)] * kernel_value(sol.spec, points[q], sol.positions[i]);
    out[static_cast<Eigen::Index>(q)] = acc;
  }
  return out;
}

}  // namespace sfe::kernel
