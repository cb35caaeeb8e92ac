#include "sfe/expansion.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <Eigen/Dense>

#include "sfe/errors.hpp"
#include "sfe/specfun.hpp"
#include "sfe/util.hpp"

namespace sfe::expansion {

std::size_t basis_size(const BasisSpec& spec) {
  if (const auto* p = std::get_if<PlaneWaveBasis>(&spec)) return p->directions.size();
  if (const auto* s = std::get_if<SphericalWaveBasis>(&spec))
    return static_cast<std::size_t>(s->order + 1) * static_cast<std::size_t>(s->order + 1);
  return std::get<EquivalentSourceBasis>(spec).sources.size();
}

void validate_basis(const BasisSpec& spec, const acoustics::RegionSpec& region) {
  if (basis_size(spec) == 0) throw DomainError("basis must contain at least one function");
  if (const auto* s = std::get_if<SphericalWaveBasis>(&spec)) {
    if (!region.contains(s->center)) throw DomainError("spherical-wave expansion center must lie inside the region");
  } else if (const auto* e = std::get_if<EquivalentSourceBasis>(&spec)) {
    for (const auto& p : e->sources)
      if (region.contains(p)) throw DomainError("equivalent sources must lie strictly outside the region");
  }
}

int truncation_order(double k, double radius, TruncationRule rule) {
  if (!(k > 0.0) || !(radius > 0.0)) throw DomainError("truncation order needs k > 0 and R > 0");
  const double kr = k * radius;
  return static_cast<int>(std::ceil(rule == TruncationRule::ceil_kR ? kr : std::numbers::e * kr / 2.0));
}

PlaneWaveBasis default_plane_wave_basis(double k, double radius) {
  const int n = truncation_order(k, radius, TruncationRule::ceil_ekR_over_2);
  return {specfun::fibonacci_directions(2 * (n + 1) * (n + 1))};
}

EquivalentSourceBasis default_equivalent_source_basis(const acoustics::RegionSpec& region, int count) {
  const double r = 1.2 * region.circumscribing_radius();
  EquivalentSourceBasis basis;
  for (const auto& d : specfun::fibonacci_directions(count)) basis.sources.push_back(region.center() + r * d.vec());
  return basis;
}

Dictionary build_dictionary(const BasisSpec& spec, const Positions& points, double k) {
  if (!(k > 0.0)) throw DomainError("wavenumber must be positive");
  if (points.empty()) throw DomainError("dictionary needs at least one point");
  const auto rows = static_cast<Eigen::Index>(points.size());
  const auto cols = static_cast<Eigen::Index>(basis_size(spec));
  CMatrix phi(rows, cols);

  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        for (Eigen::Index i = 0; i < rows; ++i) {
          const Vec3& r = points[static_cast<std::size_t>(i)];
          if constexpr (std::is_same_v<T, PlaneWaveBasis>) {
            for (Eigen::Index l = 0; l < cols; ++l)
              phi(i, l) = std::polar(1.0, -k * b.directions[static_cast<std::size_t>(l)].vec().dot(r));
          } else if constexpr (std::is_same_v<T, SphericalWaveBasis>) {
            const Vec3 rel = r - b.center;
            const double dist = rel.norm();
            const Direction dir = dist > 0.0 ? Direction(rel) : Direction(0.0, 0.0, 1.0);
            const auto jn = specfun::sph_bessel_j_all(b.order, k * dist);
            const auto ylm = specfun::sph_harmonics_all(b.order, dir);
            for (int n = 0; n <= b.order; ++n)
              for (int m = -n; m <= n; ++m) {
                const int slot = specfun::harmonic_slot(n, m);
                phi(i, slot) = jn[static_cast<std::size_t>(n)] * ylm[static_cast<std::size_t>(slot)];
              }
          } else {
            for (Eigen::Index l = 0; l < cols; ++l)
              phi(i, l) = acoustics::green_free_field(r, b.sources[static_cast<std::size_t>(l)], k);
          }
        }
      },
      spec);
  if (!phi.allFinite()) throw DomainError("dictionary has non-finite entries");
  return {std::move(phi), spec, k};
}

ExpansionSolution ridge_solve(const Dictionary& dict, const CVector& y, double lambda) {
  const CMatrix& phi = dict.matrix;
  if (phi.rows() != y.size()) throw DomainError("observation length does not match dictionary rows");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("ridge lambda must be finite and >= 0");

  ExpansionSolution sol;
  sol.lambda = lambda;
  const auto rows = phi.rows();
  const auto cols = phi.cols();

  if (lambda == 0.0) {
    if (cols > rows) throw IllPosedError("unregularized fit with more basis functions than observations");
    Eigen::JacobiSVD<CMatrix> svd(phi);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(sv.size() - 1) > 1e-12 * sv(0)))
      throw IllPosedError("unregularized fit with a rank-deficient dictionary");
    sol.coefficients = phi.colPivHouseholderQr().solve(y);
  } else if (cols > rows) {
    CMatrix gram = phi * phi.adjoint();
    gram.diagonal().array() += lambda;
    sol.coefficients = phi.adjoint() * gram.llt().solve(y);
  } else {
    // Least squares on [Phi; sqrt(lambda) I] avoids squaring the condition number.
    CMatrix stacked(rows + cols, cols);
    stacked.topRows(rows) = phi;
    stacked.bottomRows(cols) = std::sqrt(lambda) * CMatrix::Identity(cols, cols);
    CVector rhs = CVector::Zero(rows + cols);
    rhs.head(rows) = y;
    sol.coefficients = stacked.householderQr().solve(rhs);
  }
  sol.residual_norm = (y - phi * sol.coefficients).norm();
  return sol;
}

namespace {

CVector soft_threshold(const CVector& v, double tau) {
  CVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    out[i] = mag > tau ? v[i] * ((mag - tau) / mag) : cplx(0.0);
  }
  return out;
}

double spectral_norm_sq(const CMatrix& phi) {
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> g;
  CVector v(phi.cols());
  for (auto& x : v) x = cplx(g(rng), g(rng));
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < 20; ++it) {
    CVector w = phi.adjoint() * (phi * v);
    est = w.norm();
    if (est == 0.0) break;
    v = w / est;
  }
  return est;
}

}  // namespace

ExpansionSolution fista_l1(const Dictionary& dict, const CVector& y, double lambda, FistaOptions opts) {
  const CMatrix& phi = dict.matrix;
  if (phi.rows() != y.size()) throw DomainError("observation length does not match dictionary rows");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("l1 lambda must be positive");
  if (opts.max_iter < 1) throw DomainError("max_iter must be >= 1");

  auto objective = [&](const CVector& g) {
    return (y - phi * g).squaredNorm() + lambda * g.cwiseAbs().sum();
  };
  // Half-scaled problem: 1/2|y - Phi g|^2 + lambda/2 |g|_1, gradient Phi^H (Phi g - y).
  auto prox_step = [&](const CVector& from, double step) {
    return soft_threshold(from - step * (phi.adjoint() * (phi * from - y)), step * lambda / 2.0);
  };

  const double sigma_sq = spectral_norm_sq(phi);
  double step = sigma_sq > 0.0 ? 1.0 / sigma_sq : 1.0;

  ExpansionSolution sol;
  sol.lambda = lambda;
  sol.converged = false;
  CVector x = CVector::Zero(phi.cols());
  CVector z = x;
  double t = 1.0;
  double f_prev = objective(x);
  sol.objective_trace.push_back(f_prev);

  int it = 0;
  while (it < opts.max_iter) {
    ++it;
    CVector x_new = prox_step(z, step);
    double f_new = objective(x_new);
    if (f_new > f_prev) {
      // Restart momentum; fall back to a plain proximal step from x, shrinking
      // the step if the power-iteration estimate of sigma_max was low.
      t = 1.0;
      x_new = prox_step(x, step);
      f_new = objective(x_new);
      while (f_new > f_prev && step > 1e-30) {
        step *= 0.5;
        x_new = prox_step(x, step);
        f_new = objective(x_new);
      }
      if (f_new > f_prev) {
        x_new = x;
        f_new = f_prev;
      }
    }
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = x_new + ((t - 1.0) / t_new) * (x_new - x);
    const double change = std::abs(f_prev - f_new);
    x = std::move(x_new);
    t = t_new;
    sol.objective_trace.push_back(f_new);
    const bool flat = f_prev == 0.0 || change / f_prev < opts.tol;
    f_prev = f_new;
    if (flat) {
      sol.converged = true;
      break;
    }
  }
  sol.iterations = it;
  sol.residual_norm = (y - phi * x).norm();
  sol.coefficients = std::move(x);
  return sol;
}

CVector evaluate_expansion(const BasisSpec& spec, const ExpansionSolution& sol, const Positions& points, double k) {
  if (static_cast<std::size_t>(sol.coefficients.size()) != basis_size(spec))
    throw DomainError("coefficient length does not match basis size");
  return build_dictionary(spec, points, k).matrix * sol.coefficients;
}

void write_coefficients_csv(std::ostream& os, const CVector& coefficients) {
  os << "index,real,imag\n";
  for (Eigen::Index i = 0; i < coefficients.size(); ++i)
    os << i << ',' << fmt_double(coefficients[i].real()) << ',' << fmt_double(coefficients[i].imag()) << '\n';
}

void write_dictionary_csv(std::ostream& os, const Dictionary& dict) {
  os << "index,real,imag\n";
  const auto cols = dict.matrix.cols();
  for (Eigen::Index r = 0; r < dict.matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      os << r * cols + c << ',' << fmt_double(dict.matrix(r, c).real()) << ',' << fmt_double(dict.matrix(r, c).imag())
         << '\n';
}

}  // namespace sfe::expansion
