#pragma once

#include "teatpose/geom/types.hpp"

namespace teatpose::geom {

/// Rigid transform mapping source-frame coordinates to target-frame
/// coordinates: y = rotation * x + translation.
class RigidTransform {
 public:
  RigidTransform() = default;
  /// Throws invalid_input unless rotation is orthonormal with det +1 (1e-9).
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 apply_inverse(const Vec3& p) const { return rotation_.transpose() * (p - translation_); }
  Vec3 rotate(const Vec3& v) const { return rotation_ * v; }

  RigidTransform inverse() const;
  /// (*this) after `inner`: x -> this(inner(x)).
  RigidTransform compose(const RigidTransform& inner) const;

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
};

/// Pinhole camera with OpenCV axis conventions (x right, y down, z forward).
/// Pixel centers sit at integer coordinates; the extrinsic maps camera
/// coordinates into the world frame.
class CameraModel {
 public:
  CameraModel(double fx, double fy, double cx, double cy, int width = 640, int height = 480,
              RigidTransform extrinsic = {});

  /// Camera at `eye` looking at `target`, image "up" aligned with `up`.
  static CameraModel look_at(double fx, double fy, double cx, double cy, int width, int height,
                             const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  int width() const { return width_; }
  int height() const { return height_; }
  ImageSize image_size() const { return {width_, height_}; }
  const RigidTransform& extrinsic() const { return extrinsic_; }

  /// Continuous pixel coordinate of a camera-frame point (z must be > 0).
  Vec2 project(const Vec3& p_cam) const {
    return {fx_ * p_cam.x() / p_cam.z() + cx_, fy_ * p_cam.y() / p_cam.z() + cy_};
  }

  /// Camera-frame point at the given depth (z) along the pixel's ray.
  /// Throws invalid_input for depth <= 0 or a pixel outside the image.
  Vec3 backproject(const Vec2& pixel, double depth) const;

  /// Unit ray direction through `pixel`, camera frame. No bounds check.
  Vec3 ray(const Vec2& pixel) const;

  /// Pixel areas span [-0.5, width - 0.5) x [-0.5, height - 0.5).
  bool in_image(const Vec2& pixel) const;

  Vec3 to_world(const Vec3& p_cam) const { return extrinsic_.apply(p_cam); }
  Vec3 to_camera(const Vec3& p_world) const { return extrinsic_.apply_inverse(p_world); }
  Vec3 origin_world() const { return extrinsic_.translation(); }

  CameraModel with_extrinsic(const RigidTransform& extrinsic) const;

 private:
  double fx_, fy_, cx_, cy_;
  int width_, height_;
  RigidTransform extrinsic_;
};

}  // namespace teatpose::geom
