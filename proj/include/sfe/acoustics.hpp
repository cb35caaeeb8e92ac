#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "sfe/geometry.hpp"

namespace sfe::acoustics {

inline constexpr double kDefaultSoundSpeed = 343.0;

/// Shoebox room with one frequency-independent reflection magnitude on every wall.
struct RoomSpec {
  Vec3 dimensions{4.0, 5.0, 3.0};  // meters; room spans [0, L] per axis
  double reflection = 0.0;          // in [0, 1)
  double sound_speed = kDefaultSoundSpeed;

  void validate() const;
  double volume() const { return dimensions.prod(); }
  double surface() const;
  bool strictly_inside(const Vec3& p) const;
};

struct Ball {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

struct Box {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Ones();
};

/// Target region Omega.
struct RegionSpec {
  std::variant<Ball, Box> shape;

  void validate() const;
  const Vec3& center() const;
  bool contains(const Vec3& p) const;
  /// Radius of the smallest ball about center() containing the region.
  double circumscribing_radius() const;
  /// Axis-aligned half extents of the bounding box.
  Vec3 bounding_half_extents() const;
};

/// Microphone positions and complex pressures at a single wavenumber.
struct ObservationSet {
  double wavenumber = 0.0;
  Positions positions;
  CVector pressures;

  void validate() const;
  std::size_t size() const { return positions.size(); }
};

double wavenumber(double frequency_hz, double sound_speed = kDefaultSoundSpeed);

/// e^{jkd} / (4 pi d), d = |r - src|; outgoing under the e^{-j omega t} convention.
cplx green_free_field(const Vec3& r, const Vec3& src, double k);

/// Image sources of a point source in a shoebox; frequency independent, so a
/// single instance serves a whole frequency sweep.
class ImageSourceModel {
 public:
  struct Image {
    Vec3 position;
    double weight;  // rho^(number of reflections)
  };

  ImageSourceModel(const RoomSpec& room, const Vec3& source, int max_order);

  const std::vector<Image>& images() const noexcept { return images_; }
  const RoomSpec& room() const noexcept { return room_; }
  const Vec3& source() const noexcept { return source_; }
  int max_order() const noexcept { return max_order_; }

  /// Pressure at `mic` (must be strictly inside the room).
  cplx pressure(const Vec3& mic, double k) const;
  CVector pressures(const Positions& mics, double k) const;

 private:
  RoomSpec room_;
  Vec3 source_;
  int max_order_;
  std::vector<Image> images_;
};

/// Acoustic transfer function from `src` to every mic via the image source method.
CVector shoebox_atf(const RoomSpec& room, const Vec3& src, const Positions& mics, double k, int max_order);

/// Smallest order with rho^(2o) (2o+1)^2 < 1e-3, capped at 25.
int default_max_order(double reflection);

/// Uniform wall reflection magnitude reaching `t60` seconds (Eyring).
double t60_to_reflection(const Vec3& dimensions, double t60);

struct DualSphereArray {
  Vec3 center = Vec3::Zero();
  double outer_radius = 0.50;
  double inner_radius = 0.49;
  int outer_count = 21;
  int inner_count = 20;
};

struct GridArray {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Ones();
  std::array<int, 3> counts{3, 3, 2};
};

struct RandomArray {
  RegionSpec region;
  int count = 1;
};

using ArraySpec = std::variant<DualSphereArray, GridArray, RandomArray>;

/// Microphone positions. `seed` only affects the random kind.
Positions make_array(const ArraySpec& spec, std::uint64_t seed);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Adds circular complex Gaussian noise at `snr_db` relative to the mean
/// observation power. snr_db = +inf returns the input unchanged.
ObservationSet add_noise(const ObservationSet& obs, double snr_db, std::uint64_t seed);

}  // namespace sfe::acoustics
