#include "teatpose/geom/json_io.hpp"

#include "teatpose/errors.hpp"

#include <fstream>

namespace teatpose::geom {

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::parse_error, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json camera_to_json(const CameraModel& camera) {
  const Mat3& r = camera.extrinsic().rotation();
  Json rot = Json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) rot.push_back(r(i, k));
  return {{"fx", camera.fx()},
          {"fy", camera.fy()},
          {"cx", camera.cx()},
          {"cy", camera.cy()},
          {"width", camera.width()},
          {"height", camera.height()},
          {"extrinsic", {{"rotation_rowmajor", rot}, {"translation_mm", vec_to_json(camera.extrinsic().translation())}}}};
}

CameraModel camera_from_json(const Json& j) {
  try {
    RigidTransform extrinsic;
    if (j.contains("extrinsic")) {
      const Json& e = j.at("extrinsic");
      const Json& rot = e.at("rotation_rowmajor");
      if (!rot.is_array() || rot.size() != 9) throw Error(ErrorCode::parse_error, "rotation_rowmajor needs 9 values");
      Mat3 r;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) r(i, k) = rot[3 * i + k].get<double>();
      extrinsic = RigidTransform(r, vec_from_json(e.at("translation_mm")));
    }
    return {j.at("fx").get<double>(), j.at("fy").get<double>(), j.at("cx").get<double>(), j.at("cy").get<double>(),
            j.value("width", 640), j.value("height", 480), extrinsic};
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("camera json: ") + e.what());
  }
}

Json mask_to_json(const TeatMask& mask) {
  Json contour = Json::array();
  for (const auto& p : mask.contour()) contour.push_back({p.u, p.v});
  return {{"teat_id", mask.teat_id()}, {"stamp_us", mask.stamp_us()}, {"contour", contour}};
}

TeatMask mask_from_json(const Json& j, ImageSize bounds) {
  try {
    Contour contour;
    for (const auto& p : j.at("contour")) {
      if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::parse_error, "contour vertex must be [u,v]");
      contour.push_back({p[0].get<int>(), p[1].get<int>()});
    }
    return TeatMask(j.at("teat_id").get<std::string>(), j.at("stamp_us").get<std::int64_t>(), std::move(contour),
                    bounds);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("mask json: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::invalid_input, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace teatpose::geom
