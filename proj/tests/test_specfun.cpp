#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "sfe/errors.hpp"
#include "sfe/specfun.hpp"

using namespace sfe;
using namespace sfe::specfun;
using std::numbers::pi;

namespace {

Direction random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Direction(n(rng), n(rng), n(rng));
}

// Closed forms from sin/cos, used as an independent reference for low orders.
double j_closed(int n, double x) {
  const double s = std::sin(x), c = std::cos(x);
  switch (n) {
    case 0: return s / x;
    case 1: return s / (x * x) - c / x;
    case 2: return (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
    case 3: return (15.0 / (x * x * x) - 6.0 / x) * s / x - (15.0 / (x * x) - 1.0) * c / x;
  }
  return NAN;
}

// Power series j_n(x) = x^n / (2n+1)!! * sum_k (-x^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1)).
double j_series(int n, double x) {
  double pref = 1.0;
  for (int i = 1; i <= n; ++i) pref *= x / (2.0 * i + 1.0);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -0.5 * x * x / (k * (2.0 * n + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return pref * sum;
}

}  // namespace

TEST_CASE("sph_bessel_j reference values") {
  CHECK(sph_bessel_j(0, 0.0) == 1.0);
  CHECK(std::abs(sph_bessel_j(0, pi)) < 1e-14);
  const double x = 0.1;
  const double oracle = x / 3.0 - std::pow(x, 3) / 30.0 + std::pow(x, 5) / 840.0;
  CHECK(sph_bessel_j(1, x) == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(sph_bessel_j(5, 0.0) == 0.0);
}

TEST_CASE("sph_bessel_j domain errors") {
  CHECK_THROWS_AS(sph_bessel_j(0, -1.0), DomainError);
  CHECK_THROWS_AS(sph_bessel_j(61, 1.0), DomainError);
  CHECK_THROWS_AS(sph_bessel_j(-1, 1.0), DomainError);
  CHECK_THROWS_AS(sph_bessel_j(0, NAN), DomainError);
}

TEST_CASE("sph_bessel_j against closed forms and series") {
  for (double x : {0.3, 1.0, 2.5, 7.0, 19.0, 45.0})
    for (int n = 0; n <= 3; ++n) CHECK(sph_bessel_j(n, x) == doctest::Approx(j_closed(n, x)).epsilon(1e-10));
  // Small argument, high order: the regime where upward recurrence fails.
  for (double x : {0.05, 0.5, 2.0})
    for (int n : {5, 10, 20, 40, 60}) {
      const double ref = j_series(n, x);
      CHECK(std::abs(sph_bessel_j(n, x) - ref) <= 1e-10 * std::abs(ref) + 1e-300);
    }
  for (double x : {0.5, 3.0, 30.0, 100.0})
    for (int n = 0; n <= 60; ++n) CHECK(std::abs(sph_bessel_j(n, x)) <= 1.0);
}

TEST_CASE("sph_bessel_j three-term recurrence") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.5, 40.0);
  for (int t = 0; t < 200; ++t) {
    const double x = ux(rng);
    const auto j = sph_bessel_j_all(21, x);
    for (int n = 1; n <= 20; ++n) {
      const double lhs = j[n - 1] + j[n + 1];
      const double rhs = (2.0 * n + 1.0) * j[n] / x;
      const double scale = std::max({std::abs(lhs), std::abs(rhs), std::abs(j[n - 1]), std::abs(j[n + 1])});
      CHECK(std::abs(lhs - rhs) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("sph_bessel_j_all agrees with single evaluations") {
  for (double x : {0.01, 1.5, 12.0, 70.0}) {
    const auto all = sph_bessel_j_all(60, x);
    for (int n = 0; n <= 60; ++n) {
      const double single = sph_bessel_j(n, x);
      CHECK(std::abs(all[n] - single) <= 1e-13 * std::abs(single) + 1e-300);
    }
  }
}

TEST_CASE("Direction normalization is idempotent") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int t = 0; t < 1000; ++t) {
    const Direction d(g(rng), g(rng), g(rng));
    CHECK(std::abs(d.vec().norm() - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon());
    const Direction again(d.vec());
    CHECK(again.vec() == d.vec());
  }
}

TEST_CASE("j0_complex") {
  CHECK(j0_complex(0.0) == cplx(1.0, 0.0));
  CHECK(j0_complex(-1.0).real() == doctest::Approx(std::sinh(1.0)).epsilon(1e-14));
  CHECK(std::abs(j0_complex(-1.0).imag()) < 1e-15);
  CHECK(std::abs(j0_complex(pi * pi)) < 1e-14);
  // Continuity across the series switch.
  for (double r : {0.99e-4, 1.01e-4}) {
    for (double ang : {0.0, 1.0, 2.5, -2.0}) {
      const cplx z2 = std::polar(r, ang);
      const cplx w = std::sqrt(z2);
      CHECK(std::abs(j0_complex(z2) - std::sin(w) / w) < 1e-13);
    }
  }
}

TEST_CASE("j0_complex matches real j0 on the nonnegative axis") {
  for (double x = 0.0; x < 50.0; x += 0.37) CHECK(std::abs(j0_complex(x * x) - sph_bessel_j(0, x)) < 1e-12);
}

TEST_CASE("j0_complex is independent of the square-root branch") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int t = 0; t < 100; ++t) {
    const cplx z2(u(rng), u(rng));
    const cplx w = std::sqrt(z2);
    const cplx a = std::sin(w) / w;
    const cplx b = std::sin(-w) / (-w);
    CHECK(std::abs(j0_complex(z2) - a) <= 1e-12 * std::abs(a));
    CHECK(std::abs(j0_complex(z2) - b) <= 1e-12 * std::abs(b));
  }
}

TEST_CASE("sph_harmonic reference values") {
  std::mt19937_64 rng(3);
  const double y00 = 1.0 / std::sqrt(4.0 * pi);
  for (int t = 0; t < 5; ++t) CHECK(std::abs(sph_harmonic({0, 0}, random_direction(rng)) - y00) < 1e-15);

  const Direction d = random_direction(rng);
  double sum = 0.0;
  for (int m = -3; m <= 3; ++m) sum += std::norm(sph_harmonic({3, m}, d));
  CHECK(sum == doctest::Approx(7.0 / (4.0 * pi)).epsilon(1e-10));

  const cplx a = sph_harmonic({2, -1}, d);
  const cplx b = -std::conj(sph_harmonic({2, 1}, d));
  CHECK(std::abs(a - b) < 1e-14);

  CHECK_THROWS_AS(sph_harmonic({2, 3}, d), DomainError);
  CHECK_THROWS_AS(sph_harmonic({-1, 0}, d), DomainError);
}

TEST_CASE("sph_harmonic closed forms with Condon-Shortley phase") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const Direction d = random_direction(rng);
    const double th = d.zenith(), ph = d.azimuth();
    const cplx e1 = std::polar(1.0, ph);
    const cplx y10 = std::sqrt(3.0 / (4.0 * pi)) * std::cos(th);
    const cplx y11 = -std::sqrt(3.0 / (8.0 * pi)) * std::sin(th) * e1;
    const cplx y22 = 0.25 * std::sqrt(15.0 / (2.0 * pi)) * std::pow(std::sin(th), 2) * e1 * e1;
    const cplx y21 = -0.5 * std::sqrt(15.0 / (2.0 * pi)) * std::sin(th) * std::cos(th) * e1;
    CHECK(std::abs(sph_harmonic({1, 0}, d) - y10) < 1e-14);
    CHECK(std::abs(sph_harmonic({1, 1}, d) - y11) < 1e-14);
    CHECK(std::abs(sph_harmonic({2, 2}, d) - y22) < 1e-14);
    CHECK(std::abs(sph_harmonic({2, 1}, d) - y21) < 1e-14);
  }
}

TEST_CASE("sph_harmonics_all packs by slot") {
  const Direction d(0.3, -0.4, 0.8);
  const auto all = sph_harmonics_all(6, d);
  REQUIRE(all.size() == 49u);
  for (int n = 0; n <= 6; ++n)
    for (int m = -n; m <= n; ++m) CHECK(std::abs(all[harmonic_slot(n, m)] - sph_harmonic({n, m}, d)) < 1e-15);
  // Poles are well defined.
  const auto north = sph_harmonics_all(4, Direction(0, 0, 1));
  for (int n = 0; n <= 4; ++n) {
    CHECK(north[harmonic_slot(n, 0)].real() == doctest::Approx(std::sqrt((2.0 * n + 1.0) / (4.0 * pi))));
    for (int m = 1; m <= n; ++m) CHECK(std::abs(north[harmonic_slot(n, m)]) < 1e-15);
  }
}

TEST_CASE("spherical harmonics are orthonormal under Fibonacci quadrature") {
  const int q = 10000;
  const auto dirs = fibonacci_directions(q);
  const int nmax = 4, count = (nmax + 1) * (nmax + 1);
  std::vector<std::vector<cplx>> table;
  table.reserve(dirs.size());
  for (const auto& d : dirs) table.push_back(sph_harmonics_all(nmax, d));
  for (int a = 0; a < count; ++a)
    for (int b = a; b < count; ++b) {
      cplx ip = 0.0;
      for (const auto& row : table) ip += row[a] * std::conj(row[b]);
      ip *= 4.0 * pi / q;
      const double expected = a == b ? 1.0 : 0.0;
      CHECK(std::abs(ip - expected) < 2e-3);
    }
}

TEST_CASE("vmf_normalization") {
  CHECK(vmf_normalization(0.0) == 1.0);
  CHECK(vmf_normalization(1.0) == doctest::Approx(std::sinh(1.0)).epsilon(1e-15));
  CHECK(std::abs(vmf_normalization(1e-8) - 1.0) < 1e-12);
  for (double b : {0.9e-6, 1.1e-6, 1e-3, 5.0, 20.0})
    CHECK(vmf_normalization(b) == doctest::Approx(std::sinh(b) / b).epsilon(1e-12));
  CHECK_THROWS_AS(vmf_normalization(-0.1), DomainError);
}

TEST_CASE("fibonacci_directions") {
  CHECK(fibonacci_directions(1).size() == 1u);
  CHECK(fibonacci_directions(1)[0].vec().norm() == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& d : fibonacci_directions(100)) CHECK(std::abs(d.vec().norm() - 1.0) < 1e-12);
  Vec3 mean = Vec3::Zero();
  const auto dirs = fibonacci_directions(500);
  for (const auto& d : dirs) mean += d.vec();
  CHECK((mean / 500.0).norm() <= 0.02);
  CHECK_THROWS_AS(fibonacci_directions(0), DomainError);
  const auto again = fibonacci_directions(500);
  for (std::size_t i = 0; i < dirs.size(); ++i) CHECK(dirs[i].vec() == again[i].vec());
}

TEST_CASE("fibonacci_ball stays inside and spreads over the volume") {
  const Vec3 c(1.0, -2.0, 0.5);
  const auto pts = fibonacci_ball(2000, c, 0.3);
  REQUIRE(pts.size() == 2000u);
  int inner = 0;
  for (const auto& p : pts) {
    CHECK((p - c).norm() <= 0.3 + 1e-12);
    if ((p - c).norm() < 0.3 * std::cbrt(0.5)) ++inner;
  }
  // Half of the volume lies inside radius R / 2^(1/3).
  CHECK(std::abs(inner - 1000) < 40);
}

TEST_CASE("Direction normalizes and rejects zero") {
  const Direction d(3.0, 0.0, 4.0);
  CHECK(d.vec().norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.zenith() == doctest::Approx(std::acos(0.8)));
  CHECK_THROWS_AS(Direction(0.0, 0.0, 0.0), DomainError);
}
