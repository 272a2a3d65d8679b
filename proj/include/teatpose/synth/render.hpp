#pragma once

#include "teatpose/geom/point_cloud.hpp"
#include "teatpose/geom/teat_mask.hpp"
#include "teatpose/synth/scene.hpp"

#include <cstdint>
#include <vector>

namespace teatpose::synth {

inline constexpr std::size_t kMinMaskPixels = 50;

inline constexpr int kLabelNone = -1;
inline constexpr int kLabelUdder = 0;  // teat i is labelled i + 1

struct TeatTruth {
  std::string teat_id;
  Vec3 tip_mm;  // world
  Vec3 axis;    // unit, tip -> base (the TeatPose convention)
};

struct GroundTruth {
  std::vector<TeatTruth> teats;
  int width = 0, height = 0;
  std::vector<int> labels;  // row-major, nearest-hit object per pixel

  int label_at(int u, int v) const { return labels[static_cast<std::size_t>(v) * width + u]; }
};

struct RenderResult {
  geom::PointCloud cloud;  // camera frame, row-major pixel order
  std::vector<geom::TeatMask> masks;
  GroundTruth truth;
  std::int64_t stamp_us = 0;
};

/// Image-space rectangle [u0, u1) x [v0, v1), e.g. a leg or cup in front.
struct ImageRect {
  int u0 = 0, v0 = 0, u1 = 0, v1 = 0;
  bool contains(int u, int v) const { return u >= u0 && u < u1 && v >= v0 && v < v1; }
};

/// Ray casts every pixel center against udder and teats (nearest hit) and
/// applies the scene noise. Oracle masks are the outer contours of each
/// teat's largest 4-connected visible pixel set with at least
/// kMinMaskPixels pixels. Throws invalid_scene for an invalid scene or a
/// camera inside the geometry.
RenderResult render(const SceneSpec& scene, std::int64_t stamp_us = 0);

/// Masks recomputed after removing pixels covered by `occluders`. Masks
/// that shrink below kMinMaskPixels disappear.
std::vector<geom::TeatMask> occlude(const RenderResult& rendered, const std::vector<ImageRect>& occluders);

/// Oracle masks from a label image (no occlusion).
std::vector<geom::TeatMask> masks_from_labels(const GroundTruth& truth, std::int64_t stamp_us,
                                              const std::vector<ImageRect>& occluders = {});

geom::Json truth_to_json(const GroundTruth& truth);

}  // namespace teatpose::synth
