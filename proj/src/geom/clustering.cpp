#include "teatpose/geom/clustering.hpp"

#include "teatpose/errors.hpp"
#include "teatpose/geom/kdtree.hpp"

#include <algorithm>

namespace teatpose::geom {

std::vector<std::vector<std::size_t>> euclidean_cluster_indices(const PointCloud& cloud,
                                                                const ClusterParams& params) {
  if (!(params.tolerance_mm > 0.0)) throw Error(ErrorCode::invalid_parameter, "cluster tolerance must be > 0");
  if (params.min_size < 1) throw Error(ErrorCode::invalid_parameter, "cluster min_size must be >= 1");

  const auto& pts = cloud.points();
  const KdTree tree(pts);
  std::vector<bool> visited(pts.size(), false);
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> neighbors;

  for (std::size_t seed = 0; seed < pts.size(); ++seed) {
    if (visited[seed]) continue;
    std::vector<std::size_t> members{seed};
    visited[seed] = true;
    for (std::size_t head = 0; head < members.size(); ++head) {
      tree.radius_search(pts[members[head]], params.tolerance_mm, neighbors);
      for (auto n : neighbors) {
        if (!visited[n]) {
          visited[n] = true;
          members.push_back(n);
        }
      }
    }
    if (members.size() < params.min_size || members.size() > params.max_size) continue;
    std::sort(members.begin(), members.end());
    clusters.push_back(std::move(members));
  }

  std::vector<Vec3> centroids;
  centroids.reserve(clusters.size());
  for (const auto& c : clusters) {
    Vec3 sum = Vec3::Zero();
    for (auto i : c) sum += pts[i];
    centroids.push_back(sum / static_cast<double>(c.size()));
  }
  std::vector<std::size_t> order(clusters.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (clusters[a].size() != clusters[b].size()) return clusters[a].size() > clusters[b].size();
    const Vec3& ca = centroids[a];
    const Vec3& cb = centroids[b];
    if (ca.x() != cb.x()) return ca.x() < cb.x();
    if (ca.y() != cb.y()) return ca.y() < cb.y();
    if (ca.z() != cb.z()) return ca.z() < cb.z();
    return clusters[a].front() < clusters[b].front();
  });

  std::vector<std::vector<std::size_t>> sorted;
  sorted.reserve(clusters.size());
  for (auto i : order) sorted.push_back(std::move(clusters[i]));
  return sorted;
}

std::vector<PointCloud> euclidean_cluster(const PointCloud& cloud, const ClusterParams& params) {
  std::vector<PointCloud> out;
  for (const auto& members : euclidean_cluster_indices(cloud, params)) out.push_back(cloud.subset(members));
  return out;
}

}  // namespace teatpose::geom
