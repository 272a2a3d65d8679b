#include "teatpose/pose/teat_pose.hpp"

#include "teatpose/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace teatpose::pose {

std::string_view to_string(AxisMethod method) noexcept {
  return method == AxisMethod::pca ? "pca" : "normals";
}

AxisMethod parse_axis_method(std::string_view name) {
  if (name == "pca") return AxisMethod::pca;
  if (name == "normals") return AxisMethod::normals;
  throw Error(ErrorCode::parse_error, "unknown axis method '" + std::string(name) + "'");
}

Mat3 TeatPose::frame() const {
  const Vec3 z = axis.normalized();
  int least = 0;
  z.cwiseAbs().minCoeff(&least);
  const Vec3 ref = Vec3::Unit(least);
  const Vec3 x = (ref - ref.dot(z) * z).normalized();
  Mat3 f;
  f.col(0) = x;
  f.col(1) = z.cross(x);
  f.col(2) = z;
  return f;
}

geom::Json pose_to_json(const TeatPose& pose) {
  return {{"teat_id", pose.teat_id},
          {"stamp_us", pose.stamp_us},
          {"tip_mm", geom::vec_to_json(pose.tip_mm)},
          {"axis", geom::vec_to_json(pose.axis)},
          {"method", std::string(to_string(pose.method))},
          {"n_points", pose.n_points}};
}

TeatPose pose_from_json(const geom::Json& j) {
  try {
    TeatPose pose;
    pose.teat_id = j.at("teat_id").get<std::string>();
    pose.stamp_us = j.at("stamp_us").get<std::int64_t>();
    pose.tip_mm = geom::vec_from_json(j.at("tip_mm"));
    pose.axis = geom::vec_from_json(j.at("axis"));
    pose.method = parse_axis_method(j.at("method").get<std::string>());
    pose.n_points = j.at("n_points").get<std::size_t>();
    return pose;
  } catch (const geom::Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("pose json: ") + e.what());
  }
}

double axis_angle_deg(const Vec3& a, const Vec3& b) {
  const double c = std::clamp(std::abs(a.normalized().dot(b.normalized())), 0.0, 1.0);
  // atan2 form keeps precision near 0 degrees.
  const double s = a.normalized().cross(b.normalized()).norm();
  return std::atan2(s, c) * 180.0 / std::numbers::pi;
}

}  // namespace teatpose::pose
