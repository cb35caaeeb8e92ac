#include "sfe/acoustics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "sfe/errors.hpp"
#include "sfe/specfun.hpp"

namespace sfe::acoustics {

namespace {

constexpr double kMinDistance = 1e-9;

bool finite3(const Vec3& v) { return v.allFinite(); }

}  // namespace

void RoomSpec::validate() const {
  if (!finite3(dimensions) || (dimensions.array() <= 0.0).any())
    throw DomainError("room dimensions must be positive");
  if (!(reflection >= 0.0 && reflection < 1.0)) throw DomainError("wall reflection must lie in [0, 1)");
  if (!(sound_speed > 0.0) || !std::isfinite(sound_speed)) throw DomainError("sound speed must be positive");
}

double RoomSpec::surface() const {
  const auto& d = dimensions;
  return 2.0 * (d.x() * d.y() + d.y() * d.z() + d.x() * d.z());
}

bool RoomSpec::strictly_inside(const Vec3& p) const {
  return (p.array() > 0.0).all() && (p.array() < dimensions.array()).all();
}

void RegionSpec::validate() const {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if (!finite3(s.center)) throw DomainError("region center must be finite");
        if constexpr (std::is_same_v<T, Ball>) {
          if (!(s.radius > 0.0)) throw DomainError("region radius must be positive");
        } else {
          if ((s.half_extents.array() <= 0.0).any()) throw DomainError("region half extents must be positive");
        }
      },
      shape);
}

const Vec3& RegionSpec::center() const {
  return std::visit([](const auto& s) -> const Vec3& { return s.center; }, shape);
}

bool RegionSpec::contains(const Vec3& p) const {
  if (const auto* b = std::get_if<Ball>(&shape)) return (p - b->center).norm() <= b->radius;
  const auto& x = std::get<Box>(shape);
  return ((p - x.center).cwiseAbs().array() <= x.half_extents.array()).all();
}

double RegionSpec::circumscribing_radius() const {
  if (const auto* b = std::get_if<Ball>(&shape)) return b->radius;
  return std::get<Box>(shape).half_extents.norm();
}

Vec3 RegionSpec::bounding_half_extents() const {
  if (const auto* b = std::get_if<Ball>(&shape)) return Vec3::Constant(b->radius);
  return std::get<Box>(shape).half_extents;
}

void ObservationSet::validate() const {
  if (positions.empty()) throw DomainError("observation set needs at least one microphone");
  if (!(wavenumber > 0.0) || !std::isfinite(wavenumber)) throw DomainError("wavenumber must be positive");
  if (static_cast<Eigen::Index>(positions.size()) != pressures.size())
    throw DomainError("observation positions and pressures differ in length");
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      if ((positions[i] - positions[j]).norm() <= kMinDistance)
        throw DomainError("observation positions " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
}

double wavenumber(double frequency_hz, double sound_speed) {
  return 2.0 * std::numbers::pi * frequency_hz / sound_speed;
}

cplx green_free_field(const Vec3& r, const Vec3& src, double k) {
  const double d = (r - src).norm();
  if (d < kMinDistance) throw SingularityError("Green's function evaluated at its source");
  return std::polar(1.0 / (4.0 * std::numbers::pi * d), k * d);
}

ImageSourceModel::ImageSourceModel(const RoomSpec& room, const Vec3& source, int max_order)
    : room_(room), source_(source), max_order_(max_order) {
  room_.validate();
  if (max_order < 0) throw DomainError("image source order must be >= 0");
  if (!room_.strictly_inside(source)) throw DomainError("source must lie strictly inside the room");

  // Per axis: coordinate (1 - 2q) s + 2 n L with |n - q| + |n| reflections.
  // Keeping reflections <= 2 * max_order per axis leaves a lattice that is
  // mirror symmetric about each mid-plane.
  struct AxisImage {
    double coord;
    int reflections;
  };
  std::array<std::vector<AxisImage>, 3> axes;
  for (int a = 0; a < 3; ++a) {
    for (int q = 0; q <= 1; ++q) {
      for (int n = -max_order - 1; n <= max_order + 1; ++n) {
        const int refl = std::abs(n - q) + std::abs(n);
        if (refl > 2 * max_order) continue;
        axes[a].push_back({(1 - 2 * q) * source[a] + 2.0 * n * room_.dimensions[a], refl});
      }
    }
  }
  images_.reserve(axes[0].size() * axes[1].size() * axes[2].size());
  for (const auto& ix : axes[0])
    for (const auto& iy : axes[1])
      for (const auto& iz : axes[2]) {
        const int refl = ix.reflections + iy.reflections + iz.reflections;
        images_.push_back({Vec3(ix.coord, iy.coord, iz.coord), std::pow(room_.reflection, refl)});
      }
  if (room_.reflection == 0.0) std::erase_if(images_, [](const Image& im) { return im.weight == 0.0; });
}

cplx ImageSourceModel::pressure(const Vec3& mic, double k) const {
  if (!room_.strictly_inside(mic)) throw DomainError("microphone must lie strictly inside the room");
  double re = 0.0, im = 0.0;
  for (const auto& img : images_) {
    const double d = (mic - img.position).norm();
    if (d < kMinDistance) throw SingularityError("image source coincides with a microphone");
    const double amp = img.weight / (4.0 * std::numbers::pi * d);
    re += amp * std::cos(k * d);
    im += amp * std::sin(k * d);
  }
  return {re, im};
}

CVector ImageSourceModel::pressures(const Positions& mics, double k) const {
  CVector out(static_cast<Eigen::Index>(mics.size()));
  for (std::size_t i = 0; i < mics.size(); ++i) out[static_cast<Eigen::Index>(i)] = pressure(mics[i], k);
  return out;
}

CVector shoebox_atf(const RoomSpec& room, const Vec3& src, const Positions& mics, double k, int max_order) {
  if (!(k > 0.0)) throw DomainError("wavenumber must be positive");
  return ImageSourceModel(room, src, max_order).pressures(mics, k);
}

int default_max_order(double reflection) {
  if (!(reflection >= 0.0 && reflection < 1.0)) throw DomainError("wall reflection must lie in [0, 1)");
  constexpr int kCap = 25;
  if (reflection == 0.0) return 0;
  for (int o = 0; o < kCap; ++o) {
    const double growth = (2.0 * o + 1.0) * (2.0 * o + 1.0);
    if (std::pow(reflection, 2.0 * o) * growth < 1e-3) return o;
  }
  return kCap;
}

double t60_to_reflection(const Vec3& dimensions, double t60) {
  if (!(t60 > 0.0)) throw DomainError("T60 must be positive");
  if ((dimensions.array() <= 0.0).any()) throw DomainError("room dimensions must be positive");
  if (std::isinf(t60)) return 1.0;
  const double volume = dimensions.prod();
  const double surface =
      2.0 * (dimensions.x() * dimensions.y() + dimensions.y() * dimensions.z() + dimensions.x() * dimensions.z());
  const double absorption = 1.0 - std::exp(-0.161 * volume / (surface * t60));
  if (!(absorption < 1.0)) throw InfeasibleError("T60 too short: required absorption reaches 1");
  return std::sqrt(1.0 - absorption);
}

Positions make_array(const ArraySpec& spec, std::uint64_t seed) {
  return std::visit(
      [seed](const auto& s) -> Positions {
        using T = std::decay_t<decltype(s)>;
        Positions pts;
        if constexpr (std::is_same_v<T, DualSphereArray>) {
          if (s.outer_count < 1 || s.inner_count < 1) throw DomainError("dual sphere counts must be >= 1");
          if (!(s.outer_radius > 0.0 && s.inner_radius > 0.0)) throw DomainError("dual sphere radii must be > 0");
          for (const auto& d : specfun::fibonacci_directions(s.outer_count))
            pts.push_back(s.center + s.outer_radius * d.vec());
          // Rotate the inner lattice so inner points do not sit radially below outer ones.
          const Eigen::AngleAxisd twist(std::numbers::pi / s.inner_count, Vec3::UnitZ());
          for (const auto& d : specfun::fibonacci_directions(s.inner_count))
            pts.push_back(s.center + s.inner_radius * (twist * d.vec()));
        } else if constexpr (std::is_same_v<T, GridArray>) {
          for (int c : s.counts)
            if (c < 1) throw DomainError("grid counts must be >= 1");
          if ((s.half_extents.array() <= 0.0).any()) throw DomainError("grid half extents must be > 0");
          auto coord = [&](int axis, int i) {
            const int n = s.counts[static_cast<std::size_t>(axis)];
            if (n == 1) return s.center[axis];
            return s.center[axis] - s.half_extents[axis] + 2.0 * s.half_extents[axis] * i / (n - 1);
          };
          for (int i = 0; i < s.counts[0]; ++i)
            for (int j = 0; j < s.counts[1]; ++j)
              for (int l = 0; l < s.counts[2]; ++l) pts.emplace_back(coord(0, i), coord(1, j), coord(2, l));
        } else {
          if (s.count < 1) throw DomainError("random array count must be >= 1");
          s.region.validate();
          std::mt19937_64 rng(seed);
          std::uniform_real_distribution<double> unit(-1.0, 1.0);
          const Vec3 half = s.region.bounding_half_extents();
          while (static_cast<int>(pts.size()) < s.count) {
            const Vec3 p = s.region.center() + Vec3(unit(rng), unit(rng), unit(rng)).cwiseProduct(half);
            if (s.region.contains(p)) pts.push_back(p);
          }
        }
        return pts;
      },
      spec);
}

ObservationSet add_noise(const ObservationSet& obs, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
    throw DomainError("SNR must be finite or +inf");
  if (std::isinf(snr_db)) return obs;
  const double power = obs.pressures.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, obs.pressures.size()));
  if (!(power > 0.0)) throw DegenerateInputError("cannot set an SNR relative to all-zero observations");
  const double noise_power = power / std::pow(10.0, snr_db / 10.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
  ObservationSet out = obs;
  for (auto& p : out.pressures) p += cplx(gauss(rng), gauss(rng));
  return out;
}

}  // namespace sfe::acoustics
