#pragma once

#include "teatpose/geom/point_cloud.hpp"

#include <optional>

namespace teatpose::pose {

/// Half-infinite capped cylinder: a hemisphere of `radius` around
/// `cap_center` continued by a shaft along `axis` (tip -> base).
struct Capsule {
  Vec3 cap_center;
  Vec3 axis;
  double radius = 0.0;

  Vec3 tip() const { return cap_center - radius * axis; }
  /// Signed distance of p from the surface (negative inside).
  double surface_distance(const Vec3& p) const;
};

struct CapsuleFitParams {
  int max_iterations = 50;
  /// Rejects fits that turn the axis further than this from the start.
  double max_axis_change_deg = 25.0;
  /// Rejects fits whose radius leaves [min, max] times the starting radius.
  double min_radius_ratio = 0.4;
  double max_radius_ratio = 2.5;
};

/// Levenberg-Marquardt fit of a capsule to surface samples, started from a
/// tip estimate and axis. The starting radius comes from a circle fit of
/// the shaft cross-section. Fitting the whole visible surface at once keeps
/// the axis from leaning toward the camera when only one side of the teat
/// is seen. Empty when the fit is degenerate or rejected.
std::optional<Capsule> fit_capsule(const geom::PointCloud& points, const Vec3& tip, const Vec3& axis,
                                   const CapsuleFitParams& params = {});

}  // namespace teatpose::pose
