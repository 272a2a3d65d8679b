#pragma once

#include "teatpose/geom/camera.hpp"
#include "teatpose/geom/json_io.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace teatpose::synth {

struct Ellipsoid {
  Vec3 center = Vec3::Zero();
  Vec3 semi_axes{110.0, 90.0, 60.0};  // world x, y, z
};

/// Capped cylinder hanging from the udder. `length_mm` runs from the base
/// point to the apex of the hemispherical tip.
struct TeatSpec {
  Vec3 base_mm = Vec3::Zero();
  Vec3 axis = -Vec3::UnitZ();  // base -> tip, unit
  double length_mm = 50.0;
  double radius_mm = 14.0;

  Vec3 tip() const { return base_mm + axis * length_mm; }
  /// Center of the tip hemisphere; the shaft runs from base_mm to here.
  Vec3 cap_center() const { return base_mm + axis * (length_mm - radius_mm); }
};

/// Depth noise sigma(z) = a + b * (z / 1000)^2 with z in mm, so b is the
/// quadratic growth in mm per squared meter. Applied along the pixel ray.
struct NoiseModel {
  double a_mm = 0.0;
  double b_mm_per_m2 = 0.0;
  double dropout_rate = 0.0;
  double lateral_jitter_px = 0.0;

  double sigma_at(double depth_mm) const {
    const double d_m = depth_mm / 1000.0;
    return a_mm + b_mm_per_m2 * d_m * d_m;
  }
  void validate() const;
  bool is_noiseless() const { return a_mm == 0.0 && b_mm_per_m2 == 0.0 && dropout_rate == 0.0 && lateral_jitter_px == 0.0; }
};

/// Built-in presets: "none", "orbbec-like" (0.2 mm floor, 3 mm at 1 m),
/// "noisy" (a = 1 mm, b = 3 mm/m^2). Throws invalid_parameter otherwise.
NoiseModel noise_preset(std::string_view name);

geom::CameraModel default_camera();

struct SceneSpec {
  std::vector<TeatSpec> teats;
  Ellipsoid udder;
  geom::CameraModel camera = default_camera();
  NoiseModel noise;
  std::uint64_t seed = 1;

  /// 1..6 teats, positive dimensions, unit axes, teats pairwise clear of
  /// each other and tips outside (below) the udder. Throws invalid_scene.
  void validate() const;
};

/// Four slightly splayed teats seen from ~600 mm, front-below.
SceneSpec default_scene(std::uint64_t seed = 1, const NoiseModel& noise = noise_preset("orbbec-like"));

/// Teat id used in masks and ground truth for teat `index`: "T1", "T2", ...
std::string teat_id(std::size_t index);

geom::Json noise_to_json(const NoiseModel& noise);
NoiseModel noise_from_json(const geom::Json& j);
geom::Json scene_to_json(const SceneSpec& scene);
SceneSpec scene_from_json(const geom::Json& j);

}  // namespace teatpose::synth
