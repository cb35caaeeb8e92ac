#include "sfe/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sfe/errors.hpp"

namespace sfe {

Direction::Direction(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("Direction: zero or non-finite vector");
  // Leave vectors that are already unit to rounding untouched, so normalization is idempotent.
  v_ = std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() ? v : Vec3(v / n);
}

double Direction::azimuth() const { return std::atan2(v_.y(), v_.x()); }

double Direction::zenith() const { return std::acos(std::clamp(v_.z(), -1.0, 1.0)); }

}  // namespace sfe

namespace sfe::specfun {

namespace {

void check_order(int nmax) {
  if (nmax < 0 || nmax > kMaxBesselOrder)
    throw DomainError("spherical Bessel order " + std::to_string(nmax) + " outside [0, 60]");
}

}  // namespace

std::vector<double> sph_bessel_j_all(int nmax, double x) {
  check_order(nmax);
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("spherical Bessel argument must be finite and >= 0");
  std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double j0 = std::sin(x) / x;
  if (nmax == 0) {
    out[0] = j0;
    return out;
  }
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;

  if (static_cast<double>(nmax) <= x) {
    // Upward recurrence is stable while n < x.
    out[0] = j0;
    out[1] = j1;
    for (int n = 1; n < nmax; ++n) out[n + 1] = (2.0 * n + 1.0) / x * out[n] - out[n - 1];
    return out;
  }

  // Miller: run the recurrence downward from well above max(nmax, x) and
  // normalize against the closed forms for j0/j1.
  const double top = std::max<double>(nmax, x);
  const int start = static_cast<int>(top + 30.0 + std::sqrt(40.0 * top));
  std::vector<double> down(static_cast<std::size_t>(start) + 2, 0.0);
  down[start] = 1e-300;
  for (int n = start; n >= 1; --n) {
    down[n - 1] = (2.0 * n + 1.0) / x * down[n] - down[n + 1];
    if (std::abs(down[n - 1]) > 1e250)
      for (int m = n - 1; m <= start; ++m) down[m] *= 1e-250;
  }
  std::copy(down.begin(), down.begin() + nmax + 1, out.begin());
  const double scale = std::abs(j0) >= std::abs(j1) ? j0 / out[0] : j1 / out[1];
  for (auto& v : out) v *= scale;
  return out;
}

double sph_bessel_j(int order, double x) { return sph_bessel_j_all(order, x)[order]; }

cplx j0_complex(cplx z2) {
  if (std::abs(z2) < 1e-4) return 1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0;
  const cplx w = std::sqrt(z2);
  return std::sin(w) / w;
}

std::vector<cplx> sph_harmonics_all(int nmax, const Direction& dir) {
  check_order(nmax);
  const double ct = std::clamp(dir.z(), -1.0, 1.0);
  const double st = std::hypot(dir.x(), dir.y());
  const double phi = dir.azimuth();

  // Fully normalized associated Legendre values (Condon-Shortley phase included),
  // pbar[slot(n, m)] for m >= 0.
  const std::size_t count = static_cast<std::size_t>(nmax + 1) * (nmax + 1);
  std::vector<double> pbar(count, 0.0);
  pbar[harmonic_slot(0, 0)] = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int m = 1; m <= nmax; ++m)
    pbar[harmonic_slot(m, m)] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * pbar[harmonic_slot(m - 1, m - 1)];
  for (int m = 0; m < nmax; ++m)
    pbar[harmonic_slot(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * ct * pbar[harmonic_slot(m, m)];
  for (int m = 0; m <= nmax; ++m) {
    for (int n = m + 2; n <= nmax; ++n) {
      const double a = std::sqrt((4.0 * n * n - 1.0) / (static_cast<double>(n) * n - static_cast<double>(m) * m));
      const double b = std::sqrt(((n - 1.0) * (n - 1.0) - static_cast<double>(m) * m) / (4.0 * (n - 1.0) * (n - 1.0) - 1.0));
      pbar[harmonic_slot(n, m)] = a * (ct * pbar[harmonic_slot(n - 1, m)] - b * pbar[harmonic_slot(n - 2, m)]);
    }
  }

  std::vector<cplx> out(count);
  for (int n = 0; n <= nmax; ++n) {
    for (int m = 0; m <= n; ++m) {
      const cplx y = pbar[harmonic_slot(n, m)] * std::polar(1.0, m * phi);
      out[harmonic_slot(n, m)] = y;
      if (m > 0) out[harmonic_slot(n, -m)] = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
    }
  }
  return out;
}

cplx sph_harmonic(SphericalHarmonicIndex idx, const Direction& dir) {
  if (idx.order < 0 || std::abs(idx.degree) > idx.order)
    throw DomainError("spherical harmonic index requires |degree| <= order");
  return sph_harmonics_all(idx.order, dir)[harmonic_slot(idx.order, idx.degree)];
}

double vmf_normalization(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("vMF sharpness must be finite and >= 0");
  if (beta < 1e-6) return 1.0 + beta * beta / 6.0;
  return std::sinh(beta) / beta;
}

std::vector<Direction> fibonacci_directions(int n) {
  if (n < 1) throw DomainError("fibonacci_directions: n must be >= 1");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Direction> dirs;
  dirs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return dirs;
}

Positions fibonacci_ball(int n, const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw DomainError("fibonacci_ball: radius must be > 0");
  const auto dirs = fibonacci_directions(n);
  // Radii are a van der Corput sequence so consecutive lattice points do not
  // share a shell.
  Positions pts;
  pts.reserve(dirs.size());
  for (int i = 0; i < n; ++i) {
    double u = 0.0, f = 0.5;
    for (int j = i + 1; j > 0; j /= 2, f *= 0.5) u += f * (j % 2);
    pts.push_back(center + radius * std::cbrt(u) * dirs[static_cast<std::size_t>(i)].vec());
  }
  return pts;
}

}  // namespace sfe::specfun
