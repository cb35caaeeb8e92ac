#pragma once

#include <iosfwd>
#include <variant>
#include <vector>

#include "sfe/acoustics.hpp"
#include "sfe/geometry.hpp"

namespace sfe::expansion {

/// Plane waves e^{-jk<eta, r>} arriving from each direction eta.
struct PlaneWaveBasis {
  std::vector<Direction> directions;
};

/// j_nu(k|r - r_o|) Y_{nu,mu}(unit(r - r_o)) for nu <= order; (order+1)^2 columns
/// packed by specfun::harmonic_slot.
struct SphericalWaveBasis {
  int order = 0;
  Vec3 center = Vec3::Zero();
};

/// Free-field point sources on a surface enclosing the region.
struct EquivalentSourceBasis {
  Positions sources;
};

using BasisSpec = std::variant<PlaneWaveBasis, SphericalWaveBasis, EquivalentSourceBasis>;

std::size_t basis_size(const BasisSpec& spec);

/// Checks the geometric invariants of `spec` relative to the target region:
/// equivalent sources strictly outside, expansion center inside.
void validate_basis(const BasisSpec& spec, const acoustics::RegionSpec& region);

enum class TruncationRule { ceil_kR, ceil_ekR_over_2 };

int truncation_order(double k, double radius, TruncationRule rule);

/// 2 (ceil(e k R / 2) + 1)^2 Fibonacci directions.
PlaneWaveBasis default_plane_wave_basis(double k, double radius);

/// `count` Fibonacci points on a sphere of 1.2x the circumscribing radius.
EquivalentSourceBasis default_equivalent_source_basis(const acoustics::RegionSpec& region, int count);

struct Dictionary {
  CMatrix matrix;  // rows: points, columns: basis functions
  BasisSpec spec;
  double wavenumber = 0.0;
};

Dictionary build_dictionary(const BasisSpec& spec, const Positions& points, double k);

struct ExpansionSolution {
  CVector coefficients;
  double lambda = 0.0;
  double residual_norm = 0.0;  // |y - Phi gamma|
  int iterations = 0;
  bool converged = true;
  std::vector<double> objective_trace;  // FISTA only
};

/// Minimizer of |y - Phi g|^2 + lambda |g|^2. Uses the dual form when the
/// dictionary has more columns than rows.
ExpansionSolution ridge_solve(const Dictionary& dict, const CVector& y, double lambda);

struct FistaOptions {
  int max_iter = 5000;
  double tol = 1e-10;
};

/// Approximate minimizer of |y - Phi g|^2 + lambda |g|_1. A run that hits
/// max_iter is returned with converged == false.
ExpansionSolution fista_l1(const Dictionary& dict, const CVector& y, double lambda, FistaOptions opts = {});

/// Phi(points) * gamma.
CVector evaluate_expansion(const BasisSpec& spec, const ExpansionSolution& sol, const Positions& points, double k);

/// CSV with header index,real,imag.
void write_coefficients_csv(std::ostream& os, const CVector& coefficients);
/// Dictionary entries in row-major order, index = row * columns + column.
void write_dictionary_csv(std::ostream& os, const Dictionary& dict);

}  // namespace sfe::expansion
