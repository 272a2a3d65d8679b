#pragma once

#include "teatpose/geom/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace teatpose::geom {

/// Static 3-d tree over a borrowed point array. The points must outlive
/// the tree. Query results are deterministic: kNN is ordered by
/// (distance, index) and radius search by index.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points);

  /// Indices of points with squared distance < radius^2 (strict), ascending.
  void radius_search(const Vec3& query, double radius, std::vector<std::size_t>& out) const;

  /// The k nearest points to `query` (the query point itself included when
  /// it is part of the set).
  void knn(const Vec3& query, std::size_t k, std::vector<std::size_t>& out) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::size_t begin = 0, end = 0;  // range into order_
    int axis = -1;                   // -1 for leaves
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end);

  std::span<const Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace teatpose::geom
