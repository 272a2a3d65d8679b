#include "teatpose/geom/voxel_grid.hpp"

#include "teatpose/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace teatpose::geom {

VoxelGrid::VoxelGrid(double leaf_size_mm, const Vec3& origin) : leaf_(leaf_size_mm), origin_(origin) {
  if (!(leaf_size_mm > 0.0) || !std::isfinite(leaf_size_mm)) {
    throw Error(ErrorCode::invalid_parameter, "voxel leaf size must be positive");
  }
  if (!origin.allFinite()) throw Error(ErrorCode::invalid_parameter, "voxel origin must be finite");
}

Eigen::Vector3i VoxelGrid::cell_of(const Vec3& p) const {
  const Vec3 rel = (p - origin_) / leaf_;
  return {static_cast<int>(std::floor(rel.x())), static_cast<int>(std::floor(rel.y())),
          static_cast<int>(std::floor(rel.z()))};
}

PointCloud voxel_downsample(const PointCloud& cloud, const VoxelGrid& grid) {
  if (cloud.empty()) return PointCloud(cloud.frame());

  const auto& pts = cloud.points();
  std::vector<std::array<int, 3>> keys(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = grid.cell_of(pts[i]);
    keys[i] = {c.x(), c.y(), c.z()};
  }
  // Stable sort keeps input order within a voxel, which fixes the summation order.
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

  std::vector<Vec3> out;
  std::vector<Rgb> out_colors;
  const bool colored = cloud.has_colors();
  for (std::size_t begin = 0; begin < order.size();) {
    std::size_t end = begin;
    Vec3 sum = Vec3::Zero();
    std::array<unsigned, 3> csum{0, 0, 0};
    while (end < order.size() && keys[order[end]] == keys[order[begin]]) {
      sum += pts[order[end]];
      if (colored) {
        const Rgb& c = cloud.colors()[order[end]];
        csum[0] += c.r;
        csum[1] += c.g;
        csum[2] += c.b;
      }
      ++end;
    }
    const auto n = static_cast<double>(end - begin);
    out.push_back(sum / n);
    if (colored) {
      auto avg = [&](unsigned s) { return static_cast<std::uint8_t>(std::lround(s / n)); };
      out_colors.push_back({avg(csum[0]), avg(csum[1]), avg(csum[2])});
    }
    begin = end;
  }
  return PointCloud(cloud.frame(), std::move(out), std::move(out_colors));
}

}  // namespace teatpose::geom
