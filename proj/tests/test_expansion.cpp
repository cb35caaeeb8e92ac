#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "sfe/errors.hpp"
#include "sfe/expansion.hpp"
#include "sfe/metrics.hpp"
#include "sfe/specfun.hpp"

using namespace sfe;
using namespace sfe::expansion;
using std::numbers::pi;

namespace {

CMatrix random_cmatrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

CVector random_cvector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

Positions random_ball(int n, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Positions pts;
  while (static_cast<int>(pts.size()) < n) {
    Vec3 p(u(rng), u(rng), u(rng));
    if (p.norm() <= 1.0) pts.push_back(radius * p);
  }
  return pts;
}

Dictionary raw_dictionary(CMatrix m) { return {std::move(m), PlaneWaveBasis{}, 1.0}; }

// Explicit inverse, in extended precision so the oracle stays accurate for near-singular square systems.
CVector dense_ridge_oracle(const CMatrix& phi, const CVector& y, double lambda) {
  using LMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
  const LMatrix p = phi.cast<std::complex<long double>>();
  LMatrix a = p.adjoint() * p;
  a.diagonal().array() += static_cast<long double>(lambda);
  const LMatrix g = a.inverse() * (p.adjoint() * y.cast<std::complex<long double>>());
  return g.col(0).cast<cplx>();
}

double l1_objective(const CMatrix& phi, const CVector& y, const CVector& g, double lambda) {
  return (y - phi * g).squaredNorm() + lambda * g.cwiseAbs().sum();
}

}  // namespace

TEST_CASE("truncation_order") {
  const double k = 2.0 * pi * 1000.0 / 343.0;
  CHECK(truncation_order(k, 0.5, TruncationRule::ceil_kR) == 10);
  CHECK(std::numbers::e * k * 0.5 / 2.0 == doctest::Approx(12.448).epsilon(1e-4));
  CHECK(truncation_order(k, 0.5, TruncationRule::ceil_ekR_over_2) == 13);
  CHECK(truncation_order(2.0, 1.0, TruncationRule::ceil_kR) == 2);
  CHECK(default_plane_wave_basis(k, 0.5).directions.size() == 2u * 14 * 14);
}

TEST_CASE("build_dictionary reference values") {
  std::mt19937_64 rng(1);
  const double k = 9.0;
  const PlaneWaveBasis pw{specfun::fibonacci_directions(12)};
  const auto d0 = build_dictionary(pw, {Vec3::Zero()}, k);
  for (Eigen::Index l = 0; l < 12; ++l) CHECK(d0.matrix(0, l) == cplx(1.0, 0.0));

  const Vec3 c(0.1, -0.2, 0.3);
  const SphericalWaveBasis sw{4, c};
  const auto ds = build_dictionary(sw, {c}, k);
  REQUIRE(ds.matrix.cols() == 25);
  CHECK(std::abs(ds.matrix(0, 0) - 1.0 / std::sqrt(4.0 * pi)) < 1e-15);
  for (Eigen::Index l = 1; l < 25; ++l) CHECK(ds.matrix(0, l) == cplx(0.0));

  const EquivalentSourceBasis es{{Vec3(1.0, 0.0, 0.0), Vec3(0.0, 2.0, 0.0)}};
  CHECK_THROWS_AS(build_dictionary(es, {Vec3(1.0, 0.0, 0.0)}, k), SingularityError);
  CHECK_THROWS_AS(build_dictionary(pw, {}, k), DomainError);
  CHECK_THROWS_AS(build_dictionary(pw, {Vec3::Zero()}, 0.0), DomainError);
}

TEST_CASE("dictionary entries follow their closed forms") {
  std::mt19937_64 rng(2);
  const double k = 7.0;
  const auto pts = random_ball(10, 0.5, rng);
  const auto dirs = specfun::fibonacci_directions(7);
  const auto dp = build_dictionary(PlaneWaveBasis{dirs}, pts, k);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t l = 0; l < dirs.size(); ++l) {
      const double ph = -k * (dirs[l].x() * pts[i].x() + dirs[l].y() * pts[i].y() + dirs[l].z() * pts[i].z());
      CHECK(std::abs(dp.matrix(i, l) - cplx(std::cos(ph), std::sin(ph))) < 1e-14);
    }
  // Spherical wave (1, 0): j1(kr) sqrt(3/4pi) cos(theta).
  const auto ds = build_dictionary(SphericalWaveBasis{1, Vec3::Zero()}, pts, k);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = pts[i].norm(), x = k * r;
    const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    CHECK(std::abs(ds.matrix(i, 2) - j1 * std::sqrt(3.0 / (4.0 * pi)) * pts[i].z() / r) < 1e-13);
  }
}

TEST_CASE("plane-wave column solves Helmholtz under a 5-point stencil") {
  const double k = 2.0 * pi * 500.0 / 343.0;
  const double h = 2.0 * pi / k / 200.0;
  const PlaneWaveBasis pw{{Direction(0.3, -0.5, 0.8)}};
  const Vec3 x0(0.05, 0.1, -0.07);
  auto u = [&](const Vec3& p) { return build_dictionary(pw, {p}, k).matrix(0, 0); };
  cplx lap = 0.0;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = h;
    lap += (-u(x0 + 2 * e) + 16.0 * u(x0 + e) - 30.0 * u(x0) + 16.0 * u(x0 - e) - u(x0 - 2 * e)) / (12.0 * h * h);
  }
  CHECK(std::abs(lap + k * k * u(x0)) / (k * k * std::abs(u(x0))) <= 1e-6);
}

TEST_CASE("every basis kind satisfies Helmholtz") {
  std::mt19937_64 rng(3);
  const acoustics::RegionSpec region{acoustics::Ball{Vec3::Zero(), 0.5}};
  for (double f : {200.0, 800.0}) {
    const double k = acoustics::wavenumber(f);
    const int order = truncation_order(k, 0.5, TruncationRule::ceil_ekR_over_2);
    const std::vector<BasisSpec> bases{default_plane_wave_basis(k, 0.5), SphericalWaveBasis{order, Vec3::Zero()},
                                       default_equivalent_source_basis(region, 60)};
    for (const auto& basis : bases) {
      ExpansionSolution sol;
      sol.coefficients = random_cvector(static_cast<Eigen::Index>(basis_size(basis)), rng);
      const harness::ResidualGrid grid{Vec3(0.1, -0.05, 0.2), 2.0 * pi / k / 1000.0, 5};
      const double res = harness::helmholtz_residual(
          [&](const Positions& x) { return evaluate_expansion(basis, sol, x, k); }, k, grid);
      CHECK(res <= 1e-4);
    }
  }
}

TEST_CASE("ridge_solve reference values") {
  std::mt19937_64 rng(4);
  const CVector y = random_cvector(6, rng);
  CHECK((ridge_solve(raw_dictionary(CMatrix::Identity(6, 6)), y, 0.0).coefficients - y).norm() < 1e-14);

  CMatrix phi = random_cmatrix(10, 5, rng);
  phi.colwise().normalize();
  const CVector y2 = random_cvector(10, rng);
  const auto heavy = ridge_solve(raw_dictionary(phi), y2, 1e12);
  CHECK(heavy.coefficients.norm() <= (phi.adjoint() * y2).norm() / 1e12 * (1.0 + 1e-9));

  const CMatrix a = random_cmatrix(20, 8, rng);
  const CVector b = random_cvector(20, rng);
  const CVector ref = dense_ridge_oracle(a, b, 0.1);
  CHECK((ridge_solve(raw_dictionary(a), b, 0.1).coefficients - ref).norm() <= 1e-8 * ref.norm());
}

TEST_CASE("ridge_solve primal and dual forms match the dense oracle") {
  std::mt19937_64 rng(5);
  for (auto [rows, cols] : {std::pair{30, 10}, std::pair{10, 30}, std::pair{16, 16}}) {
    for (double lambda : {1e-6, 1e-3, 1.0}) {
      const CMatrix a = random_cmatrix(rows, cols, rng);
      const CVector b = random_cvector(rows, rng);
      const CVector ref = dense_ridge_oracle(a, b, lambda);
      const auto sol = ridge_solve(raw_dictionary(a), b, lambda);
      CHECK((sol.coefficients - ref).norm() <= 1e-8 * ref.norm());
      CHECK(sol.residual_norm == doctest::Approx((b - a * ref).norm()).epsilon(1e-8));
    }
  }
}

TEST_CASE("ridge_solve rejects ill-posed unregularized problems") {
  std::mt19937_64 rng(6);
  CMatrix a = random_cmatrix(10, 4, rng);
  a.col(3) = a.col(0);
  CHECK_THROWS_AS(ridge_solve(raw_dictionary(a), random_cvector(10, rng), 0.0), IllPosedError);
  CHECK_THROWS_AS(ridge_solve(raw_dictionary(random_cmatrix(4, 10, rng)), random_cvector(4, rng), 0.0),
                  IllPosedError);
  CHECK_NOTHROW(ridge_solve(raw_dictionary(a), random_cvector(10, rng), 1e-3));
  CHECK_THROWS_AS(ridge_solve(raw_dictionary(a), random_cvector(9, rng), 1e-3), DomainError);
}

TEST_CASE("ridge_solve is linear in the observations") {
  std::mt19937_64 rng(7);
  for (auto [rows, cols] : {std::pair{25, 12}, std::pair{12, 25}}) {
    const Dictionary d = raw_dictionary(random_cmatrix(rows, cols, rng));
    const CVector y1 = random_cvector(rows, rng), y2 = random_cvector(rows, rng);
    const cplx a(0.7, -1.2), b(-2.0, 0.4);
    const CVector lhs = ridge_solve(d, a * y1 + b * y2, 0.05).coefficients;
    const CVector rhs = a * ridge_solve(d, y1, 0.05).coefficients + b * ridge_solve(d, y2, 0.05).coefficients;
    CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
  }
}

TEST_CASE("nested spherical-wave dictionaries do not increase the training residual") {
  std::mt19937_64 rng(8);
  for (double f : {150.0, 300.0, 450.0}) {
    const double k = acoustics::wavenumber(f), radius = 0.4;
    const auto pts = random_ball(80, radius, rng);
    const CVector y = random_cvector(80, rng);
    const int lo = truncation_order(k, radius, TruncationRule::ceil_kR);
    const int hi = truncation_order(k, radius, TruncationRule::ceil_ekR_over_2);
    const double r_lo = ridge_solve(build_dictionary(SphericalWaveBasis{lo, Vec3::Zero()}, pts, k), y, 1e-6).residual_norm;
    const double r_hi = ridge_solve(build_dictionary(SphericalWaveBasis{hi, Vec3::Zero()}, pts, k), y, 1e-6).residual_norm;
    CHECK(r_hi <= r_lo * (1.0 + 1e-12));
  }
}

TEST_CASE("evaluate_expansion") {
  std::mt19937_64 rng(9);
  const double k = 6.0;
  const PlaneWaveBasis pw{specfun::fibonacci_directions(9)};
  const auto pts = random_ball(15, 0.5, rng);
  ExpansionSolution zero;
  zero.coefficients = CVector::Zero(9);
  CHECK(evaluate_expansion(pw, zero, pts, k).norm() == 0.0);

  ExpansionSolution e1 = zero;
  e1.coefficients[0] = 1.0;
  const CVector field = evaluate_expansion(pw, e1, pts, k);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(std::abs(field[i] - std::polar(1.0, -k * pw.directions[0].vec().dot(pts[i]))) < 1e-15);

  ExpansionSolution bad;
  bad.coefficients = CVector::Zero(3);
  CHECK_THROWS_AS(evaluate_expansion(pw, bad, pts, k), DomainError);
}

TEST_CASE("small-lambda fit interpolates a plane wave") {
  std::mt19937_64 rng(10);
  const double k = 4.0, radius = 0.5;
  const auto pts = random_ball(80, radius, rng);
  const Direction eta(0.2, 0.9, -0.3);
  CVector y(80);
  for (int i = 0; i < 80; ++i) y[i] = std::polar(1.0, -k * eta.vec().dot(pts[static_cast<std::size_t>(i)]));
  const SphericalWaveBasis sw{6, Vec3::Zero()};
  const auto sol = ridge_solve(build_dictionary(sw, pts, k), y, 1e-8);
  CHECK((y - evaluate_expansion(sw, sol, pts, k)).norm() <= 1e-3 * y.norm());
}

TEST_CASE("fista_l1 zero data and kill condition") {
  std::mt19937_64 rng(11);
  const Dictionary d = raw_dictionary(random_cmatrix(12, 30, rng));
  const auto z = fista_l1(d, CVector::Zero(12), 0.1);
  CHECK(z.coefficients.norm() == 0.0);

  const CVector y = random_cvector(12, rng);
  const double kill = 2.0 * (d.matrix.adjoint() * y).cwiseAbs().maxCoeff();
  CHECK(fista_l1(d, y, kill * (1.0 + 1e-9)).coefficients.norm() == 0.0);
  // At the exact boundary only rounding can leave anything behind.
  const auto sol = fista_l1(d, y, kill);
  CHECK(sol.coefficients.norm() <= 1e-12 * y.norm());
  // Optimality of zero: |Phi^H y|_inf <= lambda / 2.
  CHECK((d.matrix.adjoint() * y).cwiseAbs().maxCoeff() <= kill / 2.0);
  CHECK_THROWS_AS(fista_l1(d, y, 0.0), DomainError);
}

TEST_CASE("fista_l1 recovers a planted plane wave") {
  const double k = acoustics::wavenumber(1000.0);
  const PlaneWaveBasis pw{specfun::fibonacci_directions(64)};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    const auto pts = random_ball(32, 0.5, rng);
    const Dictionary d = build_dictionary(pw, pts, k);
    const int atom = static_cast<int>(rng() % 64);
    const CVector y = d.matrix.col(atom);
    // Oracle: best single-atom least-squares fit.
    int best = -1;
    double best_res = INFINITY;
    for (int l = 0; l < 64; ++l) {
      const cplx c = d.matrix.col(l).dot(y) / d.matrix.col(l).squaredNorm();
      const double r = (y - c * d.matrix.col(l)).norm();
      if (r < best_res) best_res = r, best = l;
    }
    REQUIRE(best == atom);
    const double lambda = 1e-4 * (d.matrix.adjoint() * y).cwiseAbs().maxCoeff();
    const auto sol = fista_l1(d, y, lambda);
    Eigen::Index arg;
    sol.coefficients.cwiseAbs().maxCoeff(&arg);
    CHECK(arg == atom);
    CHECK(std::abs(std::abs(sol.coefficients[atom]) - 1.0) <= 0.05);
  }
}

TEST_CASE("fista_l1 objective descends and matches a long ISTA run") {
  for (std::uint64_t seed = 20; seed < 25; ++seed) {
    std::mt19937_64 rng(seed);
    const CMatrix phi = random_cmatrix(8, 16, rng);
    const CVector y = random_cvector(8, rng);
    const double lambda = 0.3 * (phi.adjoint() * y).cwiseAbs().maxCoeff();
    const auto sol = fista_l1(raw_dictionary(phi), y, lambda, {2000, 1e-14});
    const auto& tr = sol.objective_trace;
    CHECK(tr.back() <= tr.front());
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] <= tr[i - 1]);

    // Plain ISTA with step 1 / sigma_max^2, ten times as many iterations.
    const double L = Eigen::JacobiSVD<CMatrix>(phi).singularValues()(0);
    const double step = 1.0 / (L * L);
    CVector g = CVector::Zero(16);
    for (int it = 0; it < 10 * sol.iterations; ++it) {
      CVector v = g - step * (phi.adjoint() * (phi * g - y));
      for (auto& x : v) {
        const double m = std::abs(x);
        x = m > step * lambda / 2.0 ? x * ((m - step * lambda / 2.0) / m) : cplx(0.0);
      }
      g = v;
    }
    const double ista = l1_objective(phi, y, g, lambda);
    CHECK(std::abs(tr.back() - ista) <= 1e-6 * ista);
  }
}

TEST_CASE("basis validation and CSV export") {
  const acoustics::RegionSpec region{acoustics::Ball{Vec3::Zero(), 0.5}};
  CHECK_NOTHROW(validate_basis(default_equivalent_source_basis(region, 10), region));
  CHECK_THROWS_AS(validate_basis(EquivalentSourceBasis{{Vec3(0.1, 0.0, 0.0)}}, region), DomainError);
  CHECK_THROWS_AS(validate_basis(SphericalWaveBasis{2, Vec3(1.0, 0.0, 0.0)}, region), DomainError);
  CHECK_THROWS_AS(validate_basis(PlaneWaveBasis{}, region), DomainError);
  for (const auto& p : default_equivalent_source_basis(region, 10).sources) CHECK(p.norm() == doctest::Approx(0.6));

  std::ostringstream os;
  CVector c(2);
  c << cplx(1.5, -0.25), cplx(0.1, 3.0);
  write_coefficients_csv(os, c);
  CHECK(os.str() == "index,real,imag\n0,1.5,-0.25\n1,0.1,3\n");

  std::ostringstream ds;
  write_dictionary_csv(ds, build_dictionary(PlaneWaveBasis{{Direction(1, 0, 0), Direction(0, 1, 0)}}, {Vec3::Zero()}, 1.0));
  CHECK(ds.str() == "index,real,imag\n0,1,-0\n1,1,-0\n");
}
