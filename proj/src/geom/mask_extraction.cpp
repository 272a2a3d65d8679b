#include "teatpose/geom/mask_extraction.hpp"

#include "teatpose/errors.hpp"

#include <algorithm>
#include <cmath>

namespace teatpose::geom {

namespace {

struct Edge {
  double xi, yi, xj, yj;
};

// Contour edges bucketed by lattice row: row r holds every edge whose
// half-open y-span [min, max) meets [r, r + 1). The crossing predicate is
// the same as point_in_polygon, so results are identical.
class RowIndexedPolygon {
 public:
  explicit RowIndexedPolygon(const Contour& contour) {
    lo_ = hi_ = contour.front();
    for (const auto& p : contour) {
      lo_ = {std::min(lo_.u, p.u), std::min(lo_.v, p.v)};
      hi_ = {std::max(hi_.u, p.u), std::max(hi_.v, p.v)};
    }
    rows_.resize(static_cast<std::size_t>(hi_.v - lo_.v) + 1);
    for (std::size_t i = 0, j = contour.size() - 1; i < contour.size(); j = i++) {
      const Pixel& a = contour[i];
      const Pixel& b = contour[j];
      if (a.v == b.v) continue;  // horizontal edges never cross a horizontal ray
      const Edge e{double(a.u), double(a.v), double(b.u), double(b.v)};
      for (int r = std::min(a.v, b.v); r < std::max(a.v, b.v); ++r) {
        rows_[static_cast<std::size_t>(r - lo_.v)].push_back(e);
      }
    }
  }

  bool contains(double x, double y) const {
    if (!(x >= lo_.u && x < hi_.u && y >= lo_.v && y < hi_.v)) return false;
    bool inside = false;
    for (const Edge& e : rows_[static_cast<std::size_t>(std::floor(y)) - lo_.v]) {
      if ((e.yi > y) != (e.yj > y) && x < (e.xj - e.xi) * (y - e.yi) / (e.yj - e.yi) + e.xi) {
        inside = !inside;
      }
    }
    return inside;
  }

 private:
  Pixel lo_, hi_;
  std::vector<std::vector<Edge>> rows_;
};

}  // namespace

PointCloud extract_masked_points(const PointCloud& cloud, const TeatMask& mask, const CameraModel& camera,
                                 int stride) {
  require_frame(cloud, Frame::camera, "extract_masked_points");
  if (stride < 1) throw Error(ErrorCode::invalid_parameter, "stride must be >= 1");

  const Contour polygon = subsample_contour(mask.contour(), stride);
  if (polygon.size() < 3 || signed_area(polygon) == 0.0) {
    throw Error(ErrorCode::empty_mask, "mask '" + mask.teat_id() + "' has zero area at stride " +
                                           std::to_string(stride));
  }
  const RowIndexedPolygon index(polygon);

  std::vector<std::size_t> kept;
  const auto& pts = cloud.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].z() > 0.0)) continue;
    const Vec2 q = lattice_coordinates(camera, pts[i]);
    if (index.contains(q.x(), q.y())) kept.push_back(i);
  }
  return cloud.subset(kept);
}

}  // namespace teatpose::geom
