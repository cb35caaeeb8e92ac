#pragma once

#include <vector>

#include "sfe/geometry.hpp"

namespace sfe::specfun {

inline constexpr int kMaxBesselOrder = 60;

/// Spherical Bessel function of the first kind j_n(x), n <= 60, x >= 0.
double sph_bessel_j(int order, double x);

/// j_0 .. j_nmax at x in one pass.
std::vector<double> sph_bessel_j_all(int nmax, double x);

/// sin(w)/w with w any square root of `z2`. Even in w, hence branch free.
cplx j0_complex(cplx z2);

struct SphericalHarmonicIndex {
  int order;   // nu >= 0
  int degree;  // |mu| <= nu
};

/// Linear index nu^2 + nu + mu used for packed harmonic arrays.
constexpr int harmonic_slot(int order, int degree) { return order * order + order + degree; }

/// Complex orthonormal spherical harmonic with Condon-Shortley phase.
cplx sph_harmonic(SphericalHarmonicIndex idx, const Direction& dir);

/// All harmonics up to `nmax`, packed by harmonic_slot; size (nmax+1)^2.
std::vector<cplx> sph_harmonics_all(int nmax, const Direction& dir);

/// von Mises-Fisher normalization C(beta): 1 at beta = 0, sinh(beta)/beta otherwise.
double vmf_normalization(double beta);

/// Quasi-uniform directions on the unit sphere (Fibonacci lattice).
std::vector<Direction> fibonacci_directions(int n);

/// Quasi-uniform points filling a ball of radius `radius` about `center`:
/// Fibonacci directions with radii chosen for uniform volume density.
Positions fibonacci_ball(int n, const Vec3& center, double radius);

}  // namespace sfe::specfun
