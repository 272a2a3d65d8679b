#pragma once

#include "teatpose/geom/json_io.hpp"
#include "teatpose/pipeline/frame_estimator.hpp"
#include "teatpose/pipeline/gate.hpp"
#include "teatpose/synth/render.hpp"
#include "teatpose/synth/scene.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace teatpose::pipeline {

struct LatencyModel {
  double inference_ms = 150.0;
  double network_ms = 50.0;
  double geometry_budget_ms = 50.0;

  void validate() const;
};

struct PipelineConfig {
  LatencyModel latency;
  GateParams gate;
  GeometryParams geometry;
  double camera_fps = 30.0;
  double association_mm = 15.0;
  double approach_standoff_mm = 50.0;
  std::size_t queue_capacity = 2;

  void validate() const;
};

geom::Json config_to_json(const PipelineConfig& config);
/// Missing keys keep their defaults.
PipelineConfig config_from_json(const geom::Json& j);

/// What the segmentation node sees of a sensor frame. The label image
/// stands in for the RGB image.
struct SensorFrame {
  std::int64_t stamp_us = 0;
  const synth::RenderResult* rendered = nullptr;
};

/// Segmentation node boundary. Implementations must stamp masks with the
/// frame's stamp.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual std::vector<geom::TeatMask> segment(const SensorFrame& frame) = 0;
};

/// Returns the renderer's oracle masks, optionally clipped by occluders.
class OracleSegmenter : public Segmenter {
 public:
  explicit OracleSegmenter(std::vector<synth::ImageRect> occluders = {}) : occluders_(std::move(occluders)) {}
  std::vector<geom::TeatMask> segment(const SensorFrame& frame) override;

 private:
  std::vector<synth::ImageRect> occluders_;
};

/// Camera frames in arrival order. frame(i) is only called for frames the
/// pipeline actually processes.
class SceneStream {
 public:
  virtual ~SceneStream() = default;
  virtual std::size_t size() const = 0;
  virtual synth::SceneSpec frame(std::size_t index) const = 0;
};

/// The same scene every frame with a fresh noise seed per frame
/// (seed = base seed + index).
class StaticSceneStream : public SceneStream {
 public:
  StaticSceneStream(synth::SceneSpec scene, std::size_t frames) : scene_(std::move(scene)), frames_(frames) {}
  std::size_t size() const override { return frames_; }
  synth::SceneSpec frame(std::size_t index) const override;

 private:
  synth::SceneSpec scene_;
  std::size_t frames_;
};

class FunctionSceneStream : public SceneStream {
 public:
  FunctionSceneStream(std::size_t frames, std::function<synth::SceneSpec(std::size_t)> fn)
      : frames_(frames), fn_(std::move(fn)) {}
  std::size_t size() const override { return frames_; }
  synth::SceneSpec frame(std::size_t index) const override { return fn_(index); }

 private:
  std::size_t frames_;
  std::function<synth::SceneSpec(std::size_t)> fn_;
};

struct TrackSummary {
  std::string track_id;
  std::string teat_id;
  std::size_t poses = 0;
  std::size_t resets = 0;
  std::optional<std::size_t> first_consistent_frame;  // camera frame index
  std::optional<std::int64_t> first_consistent_us;
  pose::TeatPose last_pose;
};

/// Simulated-time bookkeeping for one processed camera frame.
struct FrameRecord {
  std::size_t frame = 0;
  std::int64_t arrival_us = 0;
  std::int64_t masks_ready_us = 0;
  std::int64_t done_us = 0;
  std::size_t dropped_before = 0;  // frames skipped since the previous processed one
  StageTimings wall;              // measured; not part of the event log
};

struct PipelineResult {
  /// JSON-lines event log (simulated time only, so replays are byte-identical).
  std::vector<geom::Json> events;
  std::vector<FrameRecord> frames;
  std::vector<TrackSummary> tracks;  // creation order
  std::size_t dropped_frames = 0;
  /// Processed frames per simulated second, from first to last completion.
  double simulated_fps = 0.0;
  /// Simulated time from the first arrival until every track has fired.
  std::optional<std::int64_t> all_gates_fired_us;
  std::size_t invariant_violations = 0;
};

/// Segmentation (oracle by default, delayed by inference + network
/// latency) -> per-mask geometry -> track association -> consistency gate
/// -> approach plan. Stages run on their own threads joined by bounded
/// queues; which frames are processed is decided in simulated time with
/// freshest-frame-wins dropping, so results do not depend on host speed.
PipelineResult run_pipeline(const SceneStream& stream, const PipelineConfig& config,
                            Segmenter* segmenter = nullptr);

/// Per-track CSV (with the `# teatpose-report v1` header line).
std::string pipeline_summary_csv(const PipelineResult& result);

}  // namespace teatpose::pipeline
