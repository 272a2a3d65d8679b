#pragma once

#include "teatpose/geom/point_cloud.hpp"

#include <optional>
#include <span>

namespace teatpose::pose {

enum class TipModel {
  /// Centroid of the slab around the robust axial minimum, projected onto
  /// the axis line through the cluster centroid.
  slab_centroid,
  /// Axis line located by a circle fit of the shaft cross-section; apex
  /// found by treating slab points as lying on a rounded cap of the fitted
  /// radius. Unbiased when only one side of the teat is visible.
  rounded_cap,
};

struct TipParams {
  double percentile = 0.02;  // robust axial minimum
  double slab_mm = 5.0;
  TipModel model = TipModel::rounded_cap;
};

/// Tip of a teat whose `axis` (unit, already disambiguated) points from tip
/// to base. A single point is its own tip.
Vec3 locate_tip(const geom::PointCloud& points, const Vec3& axis, const TipParams& params = {});

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

/// Algebraic (Kasa) fit refined by Gauss-Newton on geometric distance.
/// Empty when fewer than 3 points or the design is degenerate.
std::optional<Circle> fit_circle(std::span<const Vec2> points);

/// Linear-interpolated quantile of an unsorted sample, q in [0, 1].
double quantile(std::span<const double> values, double q);

}  // namespace teatpose::pose
