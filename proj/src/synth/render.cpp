#include "teatpose/synth/render.hpp"

#include "teatpose/errors.hpp"
#include "teatpose/synth/contour.hpp"
#include "teatpose/synth/raycast.hpp"
#include "teatpose/synth/rng.hpp"

#include <algorithm>

namespace teatpose::synth {

namespace {

enum Stream : std::uint64_t { kDropout = 1, kDepth = 2, kJitterU = 3, kJitterV = 4 };

struct BoundingSphere {
  Vec3 center;
  double radius;

  bool may_hit(const Vec3& origin, const Vec3& dir) const {
    const Vec3 oc = center - origin;
    const double along = oc.dot(dir);
    if (along < -radius) return false;
    return (oc - along * dir).squaredNorm() <= radius * radius;
  }
};

}  // namespace

RenderResult render(const SceneSpec& scene, std::int64_t stamp_us) {
  scene.validate();
  const geom::CameraModel& camera = scene.camera;
  const Vec3 eye = camera.origin_world();
  if (contains(scene.udder, eye)) throw Error(ErrorCode::invalid_scene, "camera is inside the udder");
  for (std::size_t i = 0; i < scene.teats.size(); ++i) {
    if (contains(scene.teats[i], eye)) throw Error(ErrorCode::invalid_scene, "camera is inside " + teat_id(i));
  }

  std::vector<BoundingSphere> bounds;
  bounds.push_back({scene.udder.center, scene.udder.semi_axes.maxCoeff() * (1.0 + 1e-9)});
  for (const auto& t : scene.teats) {
    const double half = 0.5 * (t.length_mm - t.radius_mm);
    bounds.push_back({t.base_mm + t.axis * half, (half + t.radius_mm) * (1.0 + 1e-9)});
  }

  const int w = camera.width(), h = camera.height();
  const Mat3& rot = camera.extrinsic().rotation();
  const CounterRng rng(scene.seed);
  const NoiseModel& noise = scene.noise;

  RenderResult out;
  out.stamp_us = stamp_us;
  out.truth.width = w;
  out.truth.height = h;
  out.truth.labels.assign(static_cast<std::size_t>(w) * h, kLabelNone);
  std::vector<Vec3> points;
  points.reserve(static_cast<std::size_t>(w) * h / 2);

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const Vec3 dir_cam = camera.ray(Vec2(u, v));
      const Ray ray{eye, rot * dir_cam};
      std::optional<double> best;
      int label = kLabelNone;
      for (std::size_t k = 0; k < bounds.size(); ++k) {
        if (!bounds[k].may_hit(ray.origin, ray.direction)) continue;
        const auto t = k == 0 ? intersect(ray, scene.udder) : intersect(ray, scene.teats[k - 1]);
        if (t && (!best || *t < *best)) {
          best = t;
          label = static_cast<int>(k);
        }
      }
      if (!best) continue;
      const auto idx = static_cast<std::uint64_t>(v) * static_cast<std::uint64_t>(w) + static_cast<std::uint64_t>(u);
      out.truth.labels[idx] = label;

      if (noise.dropout_rate > 0.0 && rng.uniform(kDropout, idx) < noise.dropout_rate) continue;
      const Vec3 p = *best * dir_cam;
      const double sigma = noise.sigma_at(p.z());
      const double z = sigma > 0.0 ? p.z() + sigma * rng.gaussian(kDepth, idx) : p.z();
      if (!(z > 0.0)) continue;
      if (noise.lateral_jitter_px > 0.0) {
        const double pu = u + noise.lateral_jitter_px * rng.gaussian(kJitterU, idx);
        const double pv = v + noise.lateral_jitter_px * rng.gaussian(kJitterV, idx);
        points.emplace_back((pu - camera.cx()) * z / camera.fx(), (pv - camera.cy()) * z / camera.fy(), z);
      } else {
        points.push_back(sigma > 0.0 ? Vec3(p * (z / p.z())) : p);
      }
    }
  }
  out.cloud = geom::PointCloud(geom::Frame::camera, std::move(points));

  for (std::size_t i = 0; i < scene.teats.size(); ++i) {
    const TeatSpec& t = scene.teats[i];
    out.truth.teats.push_back({teat_id(i), t.tip(), -t.axis});
  }
  out.masks = masks_from_labels(out.truth, stamp_us);
  return out;
}

std::vector<geom::TeatMask> masks_from_labels(const GroundTruth& truth, std::int64_t stamp_us,
                                              const std::vector<ImageRect>& occluders) {
  std::vector<geom::TeatMask> masks;
  for (std::size_t i = 0; i < truth.teats.size(); ++i) {
    BinaryImage image(truth.width, truth.height);
    const int label = static_cast<int>(i) + 1;
    bool any = false;
    for (int v = 0; v < truth.height; ++v) {
      for (int u = 0; u < truth.width; ++u) {
        if (truth.label_at(u, v) != label) continue;
        const bool hidden = std::any_of(occluders.begin(), occluders.end(),
                                        [&](const ImageRect& r) { return r.contains(u, v); });
        if (!hidden) {
          image.set(u, v);
          any = true;
        }
      }
    }
    if (!any) continue;
    const auto components = connected_components(image);
    const auto largest = std::max_element(components.begin(), components.end(),
                                          [](const auto& a, const auto& b) { return a.size() < b.size(); });
    if (largest->size() < kMinMaskPixels) continue;

    BinaryImage only(truth.width, truth.height);
    for (const Pixel& p : *largest) only.set(p.u, p.v);
    masks.emplace_back(truth.teats[i].teat_id, stamp_us, trace_outer_boundary(only, largest->front()),
                       ImageSize{truth.width, truth.height});
  }
  return masks;
}

std::vector<geom::TeatMask> occlude(const RenderResult& rendered, const std::vector<ImageRect>& occluders) {
  return masks_from_labels(rendered.truth, rendered.stamp_us, occluders);
}

geom::Json truth_to_json(const GroundTruth& truth) {
  geom::Json teats = geom::Json::array();
  for (const auto& t : truth.teats) {
    teats.push_back({{"teat_id", t.teat_id}, {"tip_mm", geom::vec_to_json(t.tip_mm)}, {"axis", geom::vec_to_json(t.axis)}});
  }
  return {{"teats", teats}, {"width", truth.width}, {"height", truth.height}};
}

}  // namespace teatpose::synth
