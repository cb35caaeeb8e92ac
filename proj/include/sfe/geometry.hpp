#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace sfe {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Positions = std::vector<Vec3>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Unit vector in R^3. Construction normalizes; the zero vector is rejected.
class Direction {
 public:
  explicit Direction(const Vec3& v);
  Direction(double x, double y, double z) : Direction(Vec3(x, y, z)) {}

  const Vec3& vec() const noexcept { return v_; }
  double x() const noexcept { return v_.x(); }
  double y() const noexcept { return v_.y(); }
  double z() const noexcept { return v_.z(); }

  /// Azimuth in (-pi, pi].
  double azimuth() const;
  /// Zenith (polar angle from +z) in [0, pi].
  double zenith() const;

 private:
  Vec3 v_;
};

}  // namespace sfe
