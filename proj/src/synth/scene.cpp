#include "teatpose/synth/scene.hpp"

#include "teatpose/errors.hpp"
#include "teatpose/synth/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace teatpose::synth {

namespace {

// Closest distance between segments p0-p1 and q0-q1.
double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 1e-12 && e <= 1e-12) return r.norm();
  if (a <= 1e-12) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-12) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2), denom = a * e - b * b;
      s = denom > 1e-12 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + d1 * s) - (q0 + d2 * t)).norm();
}

Vec3 splayed(double dx, double dy) { return Vec3(dx, dy, -1.0).normalized(); }

}  // namespace

void NoiseModel::validate() const {
  if (!(a_mm >= 0.0) || !(b_mm_per_m2 >= 0.0)) throw Error(ErrorCode::invalid_parameter, "noise a and b must be >= 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(ErrorCode::invalid_parameter, "noise dropout_rate must be in [0, 1)");
  }
  if (!(lateral_jitter_px >= 0.0)) throw Error(ErrorCode::invalid_parameter, "lateral jitter must be >= 0");
}

NoiseModel noise_preset(std::string_view name) {
  if (name == "none") return {};
  if (name == "orbbec-like") return {0.2, 2.8, 0.01, 0.0};
  if (name == "noisy") return {1.0, 3.0, 0.0, 0.0};
  throw Error(ErrorCode::invalid_parameter, "unknown noise preset '" + std::string(name) + "'");
}

geom::CameraModel default_camera() {
  return geom::CameraModel::look_at(570.0, 570.0, 319.5, 239.5, 640, 480, Vec3(0.0, -560.0, -340.0),
                                    Vec3(0.0, 0.0, -100.0));
}

std::string teat_id(std::size_t index) { return "T" + std::to_string(index + 1); }

void SceneSpec::validate() const {
  if (teats.empty() || teats.size() > 6) {
    throw Error(ErrorCode::invalid_scene, "scene needs 1..6 teats, got " + std::to_string(teats.size()));
  }
  if (!(udder.semi_axes.minCoeff() > 0.0)) throw Error(ErrorCode::invalid_scene, "udder semi-axes must be > 0");
  try {
    noise.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::invalid_scene, e.what());
  }
  for (std::size_t i = 0; i < teats.size(); ++i) {
    const TeatSpec& t = teats[i];
    const std::string id = teat_id(i);
    if (!(t.radius_mm > 0.0) || !(t.length_mm > t.radius_mm)) {
      throw Error(ErrorCode::invalid_scene, id + ": need length > radius > 0");
    }
    if (std::abs(t.axis.norm() - 1.0) > 1e-9) throw Error(ErrorCode::invalid_scene, id + ": axis is not unit length");
    if (contains(udder, t.tip())) throw Error(ErrorCode::invalid_scene, id + ": tip inside the udder");
    for (std::size_t k = 0; k < i; ++k) {
      const TeatSpec& o = teats[k];
      if (segment_distance(t.base_mm, t.cap_center(), o.base_mm, o.cap_center()) <= t.radius_mm + o.radius_mm) {
        throw Error(ErrorCode::invalid_scene, id + " interpenetrates " + teat_id(k));
      }
    }
  }
}

SceneSpec default_scene(std::uint64_t seed, const NoiseModel& noise) {
  SceneSpec scene;
  scene.seed = seed;
  scene.noise = noise;
  const double tilt_x = std::tan(8.0 * std::numbers::pi / 180.0);
  const double tilt_y = std::tan(5.0 * std::numbers::pi / 180.0);
  struct Placement {
    double x, y, sx, sy;
  };
  const Placement placements[] = {{-55.0, -35.0, -1, -1}, {55.0, -35.0, 1, -1}, {-25.0, 35.0, -1, 1}, {25.0, 35.0, 1, 1}};
  const Ellipsoid& u = scene.udder;
  for (const auto& p : placements) {
    const double rx = (p.x - u.center.x()) / u.semi_axes.x();
    const double ry = (p.y - u.center.y()) / u.semi_axes.y();
    const double z_surface = u.center.z() - u.semi_axes.z() * std::sqrt(1.0 - rx * rx - ry * ry);
    TeatSpec teat;
    teat.base_mm = Vec3(p.x, p.y, z_surface + 6.0);  // rooted slightly inside the udder
    teat.axis = splayed(p.sx * tilt_x, p.sy * tilt_y);
    scene.teats.push_back(teat);
  }
  return scene;
}

geom::Json noise_to_json(const NoiseModel& n) {
  return {{"a_mm", n.a_mm}, {"b_mm_per_m2", n.b_mm_per_m2}, {"dropout_rate", n.dropout_rate},
          {"lateral_jitter_px", n.lateral_jitter_px}};
}

NoiseModel noise_from_json(const geom::Json& j) {
  if (j.is_string()) return noise_preset(j.get<std::string>());
  NoiseModel n;
  n.a_mm = j.value("a_mm", 0.0);
  n.b_mm_per_m2 = j.value("b_mm_per_m2", 0.0);
  n.dropout_rate = j.value("dropout_rate", 0.0);
  n.lateral_jitter_px = j.value("lateral_jitter_px", 0.0);
  n.validate();
  return n;
}

geom::Json scene_to_json(const SceneSpec& scene) {
  geom::Json teats = geom::Json::array();
  for (const auto& t : scene.teats) {
    teats.push_back({{"base_mm", geom::vec_to_json(t.base_mm)},
                     {"axis", geom::vec_to_json(t.axis)},
                     {"length_mm", t.length_mm},
                     {"radius_mm", t.radius_mm}});
  }
  return {{"seed", scene.seed},
          {"udder", {{"center_mm", geom::vec_to_json(scene.udder.center)},
                     {"semi_axes_mm", geom::vec_to_json(scene.udder.semi_axes)}}},
          {"teats", teats},
          {"camera", geom::camera_to_json(scene.camera)},
          {"noise", noise_to_json(scene.noise)}};
}

SceneSpec scene_from_json(const geom::Json& j) {
  try {
    SceneSpec scene;
    scene.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("udder")) {
      scene.udder.center = geom::vec_from_json(j.at("udder").at("center_mm"));
      scene.udder.semi_axes = geom::vec_from_json(j.at("udder").at("semi_axes_mm"));
    }
    for (const auto& t : j.at("teats")) {
      TeatSpec teat;
      teat.base_mm = geom::vec_from_json(t.at("base_mm"));
      teat.axis = geom::vec_from_json(t.at("axis"));
      teat.length_mm = t.value("length_mm", 50.0);
      teat.radius_mm = t.value("radius_mm", 14.0);
      scene.teats.push_back(teat);
    }
    if (j.contains("camera")) scene.camera = geom::camera_from_json(j.at("camera"));
    if (j.contains("noise")) scene.noise = noise_from_json(j.at("noise"));
    scene.validate();
    return scene;
  } catch (const geom::Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("scene json: ") + e.what());
  }
}

}  // namespace teatpose::synth
