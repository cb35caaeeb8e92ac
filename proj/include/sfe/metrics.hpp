#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sfe/acoustics.hpp"
#include "sfe/geometry.hpp"

namespace sfe::harness {

inline constexpr double kNmseFloorDb = -150.0;

/// 10 log10(sum |est - truth|^2 / sum |truth|^2), floored at -150 dB.
double nmse_db(const CVector& estimate, const CVector& truth);

using FieldSampler = std::function<CVector(const Positions&)>;

/// Cubic lattice of nodes_per_axis^3 points with spacing h about center.
struct ResidualGrid {
  Vec3 center = Vec3::Zero();
  double spacing = 0.0;
  int nodes_per_axis = 5;

  Positions nodes() const;
};

/// Max over interior nodes of |7-point Laplacian + k^2 u| / (k^2 max|u|).
/// Requires spacing <= wavelength / 40.
double helmholtz_residual(const FieldSampler& field, double k, const ResidualGrid& grid);

/// Evaluation positions with the true and per-estimator estimated pressures.
struct FieldGrid {
  double wavenumber = 0.0;
  Positions positions;
  CVector truth;
  std::map<std::string, CVector> estimates;

  void validate() const;
};

/// Regular evaluation lattice (spacing) clipped to the region.
Positions lattice_in_region(const acoustics::RegionSpec& region, double spacing);

/// Axis-aligned slice through the region: resolution x resolution nodes over
/// the region's bounding square in the plane, clipped to the region.
struct PlaneSpec {
  int axis = 2;         // normal axis: 0 x, 1 y, 2 z
  double offset = 0.0;  // absolute coordinate along the normal axis
  int resolution = 21;
};

struct HeatmapGrid {
  Positions points;
  std::vector<std::pair<double, double>> plane_coords;
};

HeatmapGrid heatmap_grid(const acoustics::RegionSpec& region, const PlaneSpec& plane);

/// CSV with header x,y,re,im,magnitude (x, y: in-plane coordinates).
void write_heatmap_csv(std::ostream& os, const HeatmapGrid& grid, const CVector& values);

/// heatmap_grid + sampling + CSV in one step.
void export_heatmap(std::ostream& os, const acoustics::RegionSpec& region, const PlaneSpec& plane,
                    const FieldSampler& field);

}  // namespace sfe::harness
