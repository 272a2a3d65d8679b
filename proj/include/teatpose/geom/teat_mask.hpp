#pragma once

#include "teatpose/geom/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace teatpose::geom {

/// Closed polygon on the pixel-corner lattice: vertex (i, j) is the top-left
/// corner of pixel (i, j), i.e. image position (i - 0.5, j - 0.5) in the
/// camera's pixel-center convention. Valid vertices satisfy 0 <= i <= width
/// and 0 <= j <= height.
using Contour = std::vector<Pixel>;

/// Per-teat segmentation result in its compact contour form.
class TeatMask {
 public:
  /// Validates: >= 3 vertices, all inside `bounds`, and simple (no two
  /// non-adjacent edges cross or overlap; pixel-boundary contours may touch
  /// themselves at a shared vertex). Throws invalid_input otherwise.
  TeatMask(std::string teat_id, std::int64_t stamp_us, Contour contour, ImageSize bounds);

  const std::string& teat_id() const { return teat_id_; }
  std::int64_t stamp_us() const { return stamp_us_; }
  const Contour& contour() const { return contour_; }

  TeatMask with_stamp(std::int64_t stamp_us) const;

  friend bool operator==(const TeatMask&, const TeatMask&) = default;

 private:
  std::string teat_id_;
  std::int64_t stamp_us_ = 0;
  Contour contour_;
};

/// Every `stride`-th vertex, starting at vertex 0.
Contour subsample_contour(std::span<const Pixel> contour, int stride);

/// Signed shoelace area in lattice units.
double signed_area(std::span<const Pixel> contour);

bool is_simple_polygon(std::span<const Pixel> contour);

/// Even-odd crossing test with the half-open edge rule: a horizontal ray
/// toward +x, edges counted when exactly one endpoint has y > point.y.
/// `x`, `y` are lattice coordinates.
bool point_in_polygon(std::span<const Pixel> contour, double x, double y);

}  // namespace teatpose::geom
