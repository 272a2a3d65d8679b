#include "teatpose/geom/camera.hpp"

#include "teatpose/errors.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <string>

namespace teatpose::geom {

namespace {
constexpr double kRotationTolerance = 1e-9;
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw Error(ErrorCode::invalid_input, "rigid transform has non-finite entries");
  }
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kRotationTolerance || std::abs(rotation.determinant() - 1.0) > kRotationTolerance) {
    throw Error(ErrorCode::invalid_input, "extrinsic rotation is not a proper rotation");
  }
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation_ = rotation_.transpose();
  inv.translation_ = -(inv.rotation_ * translation_);
  return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& inner) const {
  RigidTransform out;
  out.rotation_ = rotation_ * inner.rotation_;
  out.translation_ = rotation_ * inner.translation_ + translation_;
  return out;
}

CameraModel::CameraModel(double fx, double fy, double cx, double cy, int width, int height,
                         RigidTransform extrinsic)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height),
      extrinsic_(std::move(extrinsic)) {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::invalid_input, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::invalid_input, "image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw Error(ErrorCode::invalid_input, "principal point outside the image");
  }
}

CameraModel CameraModel::look_at(double fx, double fy, double cx, double cy, int width, int height,
                                 const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = target - eye;
  if (forward.norm() == 0.0) {
    throw Error(ErrorCode::invalid_input, "look_at: eye and target coincide");
  }
  const Vec3 z = forward.normalized();
  const Vec3 right = z.cross(up);
  if (right.norm() < 1e-9) {
    throw Error(ErrorCode::invalid_input, "look_at: viewing direction parallel to up");
  }
  const Vec3 x = right.normalized();
  const Vec3 y = z.cross(x);
  Mat3 rotation;
  rotation.col(0) = x;
  rotation.col(1) = y;
  rotation.col(2) = z;
  return {fx, fy, cx, cy, width, height, RigidTransform(rotation, eye)};
}

Vec3 CameraModel::backproject(const Vec2& pixel, double depth) const {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw Error(ErrorCode::invalid_input, "backproject: depth must be positive, got " + std::to_string(depth));
  }
  if (!in_image(pixel)) {
    throw Error(ErrorCode::invalid_input, "backproject: pixel outside the image");
  }
  return {(pixel.x() - cx_) * depth / fx_, (pixel.y() - cy_) * depth / fy_, depth};
}

Vec3 CameraModel::ray(const Vec2& pixel) const {
  return Vec3((pixel.x() - cx_) / fx_, (pixel.y() - cy_) / fy_, 1.0).normalized();
}

bool CameraModel::in_image(const Vec2& pixel) const {
  return pixel.x() >= -0.5 && pixel.x() < width_ - 0.5 && pixel.y() >= -0.5 &&
         pixel.y() < height_ - 0.5;
}

CameraModel CameraModel::with_extrinsic(const RigidTransform& extrinsic) const {
  return {fx_, fy_, cx_, cy_, width_, height_, extrinsic};
}

}  // namespace teatpose::geom
