#pragma once

#include "teatpose/geom/camera.hpp"
#include "teatpose/geom/teat_mask.hpp"

#include <json.hpp>

#include <filesystem>

namespace teatpose::geom {

using Json = nlohmann::json;

// {"fx","fy","cx","cy","width","height",
//  "extrinsic":{"rotation_rowmajor":[9],"translation_mm":[3]}}
Json camera_to_json(const CameraModel& camera);
CameraModel camera_from_json(const Json& j);

// {"teat_id": string, "stamp_us": integer, "contour": [[u,v],...]}
Json mask_to_json(const TeatMask& mask);
TeatMask mask_from_json(const Json& j, ImageSize bounds);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

Json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const Json& j);

}  // namespace teatpose::geom
