#include "sfe/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include "sfe/errors.hpp"
#include "sfe/util.hpp"

namespace sfe::harness {

double nmse_db(const CVector& estimate, const CVector& truth) {
  if (truth.size() == 0 || estimate.size() != truth.size())
    throw DomainError("NMSE needs equal, nonzero lengths");
  const double denom = truth.squaredNorm();
  if (!(denom > 0.0)) throw DomainError("NMSE undefined for an all-zero true field");
  const double ratio = (estimate - truth).squaredNorm() / denom;
  if (std::isnan(ratio)) return ratio;
  return std::max(kNmseFloorDb, 10.0 * std::log10(ratio));
}

Positions ResidualGrid::nodes() const {
  Positions pts;
  const double half = 0.5 * (nodes_per_axis - 1);
  for (int i = 0; i < nodes_per_axis; ++i)
    for (int j = 0; j < nodes_per_axis; ++j)
      for (int l = 0; l < nodes_per_axis; ++l) pts.push_back(center + spacing * Vec3(i - half, j - half, l - half));
  return pts;
}

double helmholtz_residual(const FieldSampler& field, double k, const ResidualGrid& grid) {
  if (!(k > 0.0)) throw DomainError("wavenumber must be positive");
  if (grid.nodes_per_axis < 3) throw DomainError("residual grid needs at least 3 nodes per axis");
  const double wavelength = 2.0 * std::numbers::pi / k;
  if (!(grid.spacing > 0.0) || grid.spacing > wavelength / 40.0)
    throw DomainError("residual grid spacing must be in (0, wavelength/40]");

  const int n = grid.nodes_per_axis;
  const CVector u = field(grid.nodes());
  if (u.size() != n * n * n) throw DomainError("field sampler returned the wrong number of values");
  auto at = [&](int i, int j, int l) { return u[(i * n + j) * n + l]; };

  const double peak = u.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) return 0.0;
  const double h2 = grid.spacing * grid.spacing;
  double worst = 0.0;
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j)
      for (int l = 1; l + 1 < n; ++l) {
        const cplx lap = (at(i + 1, j, l) + at(i - 1, j, l) + at(i, j + 1, l) + at(i, j - 1, l) + at(i, j, l + 1) +
                          at(i, j, l - 1) - 6.0 * at(i, j, l)) /
                         h2;
        worst = std::max(worst, std::abs(lap + k * k * at(i, j, l)));
      }
  return worst / (k * k * peak);
}

void FieldGrid::validate() const {
  if (positions.empty()) throw DomainError("field grid is empty");
  if (truth.size() != static_cast<Eigen::Index>(positions.size())) throw DomainError("truth length mismatch");
  for (const auto& [name, est] : estimates)
    if (est.size() != truth.size()) throw DomainError("estimate '" + name + "' length mismatch");
}

Positions lattice_in_region(const acoustics::RegionSpec& region, double spacing) {
  if (!(spacing > 0.0)) throw DomainError("lattice spacing must be positive");
  const Vec3 half = region.bounding_half_extents();
  Positions pts;
  std::array<int, 3> count{};
  for (int a = 0; a < 3; ++a) count[a] = static_cast<int>(std::floor(half[a] / spacing + 1e-9));
  for (int i = -count[0]; i <= count[0]; ++i)
    for (int j = -count[1]; j <= count[1]; ++j)
      for (int l = -count[2]; l <= count[2]; ++l) {
        const Vec3 p = region.center() + spacing * Vec3(i, j, l);
        if (region.contains(p)) pts.push_back(p);
      }
  return pts;
}

HeatmapGrid heatmap_grid(const acoustics::RegionSpec& region, const PlaneSpec& plane) {
  if (plane.axis < 0 || plane.axis > 2) throw DomainError("plane axis must be 0, 1 or 2");
  if (plane.resolution < 1) throw DomainError("plane resolution must be >= 1");
  const int ua = plane.axis == 0 ? 1 : 0;
  const int va = 3 - plane.axis - ua;
  const Vec3 half = region.bounding_half_extents();
  const Vec3& c = region.center();
  HeatmapGrid grid;
  for (int i = 0; i < plane.resolution; ++i)
    for (int j = 0; j < plane.resolution; ++j) {
      auto coord = [&](int axis, int idx) {
        if (plane.resolution == 1) return c[axis];
        return c[axis] - half[axis] + 2.0 * half[axis] * idx / (plane.resolution - 1);
      };
      Vec3 p;
      p[plane.axis] = plane.offset;
      p[ua] = coord(ua, i);
      p[va] = coord(va, j);
      if (!region.contains(p)) continue;
      grid.points.push_back(p);
      grid.plane_coords.emplace_back(p[ua], p[va]);
    }
  if (grid.points.empty()) throw DomainError("slice plane does not intersect the region");
  return grid;
}

void write_heatmap_csv(std::ostream& os, const HeatmapGrid& grid, const CVector& values) {
  if (values.size() != static_cast<Eigen::Index>(grid.points.size())) throw DomainError("heatmap value count mismatch");
  os << "x,y,re,im,magnitude\n";
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const cplx v = values[static_cast<Eigen::Index>(i)];
    os << fmt_double(grid.plane_coords[i].first) << ',' << fmt_double(grid.plane_coords[i].second) << ','
       << fmt_double(v.real()) << ',' << fmt_double(v.imag()) << ',' << fmt_double(std::abs(v)) << '\n';
  }
}

void export_heatmap(std::ostream& os, const acoustics::RegionSpec& region, const PlaneSpec& plane,
                    const FieldSampler& field) {
  const auto grid = heatmap_grid(region, plane);
  write_heatmap_csv(os, grid, field(grid.points));
}

}  // namespace sfe::harness
