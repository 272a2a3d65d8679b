#pragma once

#include "teatpose/geom/point_cloud.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace teatpose::geom {

struct ClusterParams {
  double tolerance_mm = 10.0;
  std::size_t min_size = 1;
  std::size_t max_size = std::numeric_limits<std::size_t>::max();
};

/// Connected components of the graph joining points closer than the
/// tolerance (strict). Each cluster lists input indices ascending; clusters
/// come sorted by descending size, then lexicographic centroid.
std::vector<std::vector<std::size_t>> euclidean_cluster_indices(const PointCloud& cloud,
                                                                const ClusterParams& params);

std::vector<PointCloud> euclidean_cluster(const PointCloud& cloud, const ClusterParams& params);

}  // namespace teatpose::geom
