#include "teatpose/pipeline/pipeline.hpp"

#include "teatpose/pipeline/approach.hpp"
#include "teatpose/pipeline/association.hpp"
#include "teatpose/pipeline/bounded_queue.hpp"
#include "teatpose/text.hpp"

#include <cmath>
#include <exception>
#include <future>
#include <sstream>
#include <thread>

namespace teatpose::pipeline {

std::vector<geom::TeatMask> OracleSegmenter::segment(const SensorFrame& frame) {
  if (frame.rendered == nullptr) throw Error(ErrorCode::invalid_input, "sensor frame without image");
  if (occluders_.empty()) {
    std::vector<geom::TeatMask> out;
    out.reserve(frame.rendered->masks.size());
    for (const auto& m : frame.rendered->masks) out.push_back(m.with_stamp(frame.stamp_us));
    return out;
  }
  return synth::masks_from_labels(frame.rendered->truth, frame.stamp_us, occluders_);
}

synth::SceneSpec StaticSceneStream::frame(std::size_t index) const {
  synth::SceneSpec s = scene_;
  s.seed = scene_.seed + index;
  return s;
}

namespace {

struct Slot {
  std::size_t frame = 0;
  std::int64_t arrival_us = 0;
  std::int64_t masks_ready_us = 0;
  std::int64_t done_us = 0;
  std::size_t dropped_before = 0;
};

std::int64_t to_us(double ms) { return std::llround(ms * 1000.0); }

// Decides which frames survive both freshest-frame-wins stages. A stage
// that becomes free picks the newest input already available and drops
// the older ones; an idle stage takes the next input as soon as it lands.
std::vector<Slot> schedule(std::size_t n, const PipelineConfig& config) {
  auto arrival = [&](std::size_t i) { return std::llround(static_cast<double>(i) * 1e6 / config.camera_fps); };
  const std::int64_t seg_cost = to_us(config.latency.inference_ms + config.latency.network_ms);
  const std::int64_t geo_cost = to_us(config.latency.geometry_budget_ms);

  std::vector<Slot> seg;
  std::int64_t seg_free = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t chosen = i;
    std::int64_t start = arrival(i);
    if (start < seg_free) {
      while (chosen + 1 < n && arrival(chosen + 1) <= seg_free) ++chosen;
      start = seg_free;
    }
    Slot s;
    s.frame = chosen;
    s.arrival_us = arrival(chosen);
    s.masks_ready_us = start + seg_cost;
    seg.push_back(s);
    seg_free = s.masks_ready_us;
    i = chosen + 1;
  }

  std::vector<Slot> out;
  std::int64_t pose_free = 0;
  std::size_t previous = 0;
  bool first = true;
  for (std::size_t k = 0; k < seg.size();) {
    std::size_t chosen = k;
    std::int64_t start = seg[k].masks_ready_us;
    if (start < pose_free) {
      while (chosen + 1 < seg.size() && seg[chosen + 1].masks_ready_us <= pose_free) ++chosen;
      start = pose_free;
    }
    Slot s = seg[chosen];
    s.done_us = start + geo_cost;
    s.dropped_before = first ? s.frame : s.frame - previous - 1;
    previous = s.frame;
    first = false;
    pose_free = s.done_us;
    out.push_back(s);
    k = chosen + 1;
  }
  return out;
}

struct SegRequest {
  std::int64_t stamp_us = 0;
  std::shared_ptr<const synth::RenderResult> rendered;
  std::promise<std::vector<geom::TeatMask>> masks;
};

struct PoseRequest {
  Slot slot;
  geom::CameraModel camera;
  std::shared_ptr<const synth::RenderResult> rendered;
  std::shared_future<std::vector<geom::TeatMask>> masks;
};

geom::Json array3(const Vec3& v) { return geom::vec_to_json(v); }

// Consumes frames in order: geometry, association, gating, planning.
class PoseStage {
 public:
  PoseStage(const PipelineConfig& config, PipelineResult& result)
      : config_(config), result_(result), associator_(config.association_mm) {}

  void process(PoseRequest& req) {
    const Slot& s = req.slot;
    FrameRecord rec{s.frame, s.arrival_us, s.masks_ready_us, s.done_us, s.dropped_before, {}};

    std::vector<geom::TeatMask> masks;
    try {
      masks = req.masks.get();
    } catch (const Error& e) {
      frame_event(s, 0);
      error_event(s.frame, "", e.code(), e.what());
      result_.frames.push_back(rec);
      return;
    }
    frame_event(s, masks.size());

    for (const auto& m : masks) {
      if (m.stamp_us() != s.arrival_us) {
        ++result_.invariant_violations;
        result_.events.push_back({{"type", "violation"},
                                  {"frame", s.frame},
                                  {"what", "mask stamp " + std::to_string(m.stamp_us()) + " on frame stamped " +
                                               std::to_string(s.arrival_us)}});
        result_.frames.push_back(rec);
        return;
      }
    }

    const FrameEstimate est = estimate_frame(req.rendered->cloud, masks, req.camera, config_.geometry, s.arrival_us);
    rec.wall = est.timings;

    std::vector<pose::TeatPose> poses;
    for (const auto& t : est.teats) {
      if (t.pose) poses.push_back(*t.pose);
      else error_event(s.frame, t.teat_id, t.error.value_or(ErrorCode::invalid_input), t.message);
    }

    const auto assoc = associator_.associate(poses);
    for (const auto& id : assoc.expired) {
      gates_.erase(id);
      result_.events.push_back({{"type", "track-expired"}, {"frame", s.frame}, {"track", id}});
    }

    for (std::size_t i = 0; i < poses.size(); ++i) {
      const auto& p = poses[i];
      const auto& id = assoc.track_ids[i];
      TrackSummary& track = summary(id, p.teat_id);
      ++track.poses;
      track.last_pose = p;
      result_.events.push_back({{"type", "pose"}, {"frame", s.frame}, {"track", id}, {"pose", pose::pose_to_json(p)}});

      auto [it, inserted] = gates_.try_emplace(id, config_.gate);
      const GateDecision d = it->second.update(p);
      if (d == GateDecision::reset) ++track.resets;
      result_.events.push_back({{"type", "gate"},
                                {"frame", s.frame},
                                {"track", id},
                                {"decision", std::string(to_string(d))},
                                {"window", it->second.window().size()},
                                {"t_us", s.done_us}});
      if (d == GateDecision::consistent) {
        if (!track.first_consistent_frame) {
          track.first_consistent_frame = s.frame;
          track.first_consistent_us = s.done_us;
        }
        const auto plan = approach_plan(p, config_.approach_standoff_mm);
        result_.events.push_back({{"type", "plan"},
                                  {"frame", s.frame},
                                  {"track", id},
                                  {"teat_id", p.teat_id},
                                  {"approach_mm", array3(plan[0])},
                                  {"tip_mm", array3(plan[1])},
                                  {"t_us", s.done_us}});
      }
    }

    if (!result_.all_gates_fired_us && !gates_.empty()) {
      bool all = true;
      for (const auto& [id, gate] : gates_) all = all && summary_of(id).first_consistent_frame.has_value();
      if (all) result_.all_gates_fired_us = s.done_us - first_arrival_;
    }
    result_.frames.push_back(rec);
  }

  void set_first_arrival(std::int64_t t) { first_arrival_ = t; }

 private:
  void frame_event(const Slot& s, std::size_t masks) {
    result_.events.push_back({{"type", "frame"},
                              {"frame", s.frame},
                              {"stamp_us", s.arrival_us},
                              {"masks_ready_us", s.masks_ready_us},
                              {"done_us", s.done_us},
                              {"dropped_before", s.dropped_before},
                              {"masks", masks}});
  }

  void error_event(std::size_t frame, const std::string& teat, ErrorCode code, const std::string& message) {
    result_.events.push_back({{"type", "error"},
                              {"frame", frame},
                              {"teat_id", teat},
                              {"code", std::string(to_string(code))},
                              {"message", message}});
  }

  TrackSummary& summary(const std::string& track_id, const std::string& teat_id) {
    auto [it, inserted] = track_index_.try_emplace(track_id, result_.tracks.size());
    if (inserted) {
      TrackSummary t;
      t.track_id = track_id;
      t.teat_id = teat_id;
      result_.tracks.push_back(t);
    }
    return result_.tracks[it->second];
  }

  const TrackSummary& summary_of(const std::string& track_id) const {
    return result_.tracks[track_index_.at(track_id)];
  }

  const PipelineConfig& config_;
  PipelineResult& result_;
  TrackAssociator associator_;
  std::map<std::string, ConsistencyGate> gates_;
  std::map<std::string, std::size_t> track_index_;
  std::int64_t first_arrival_ = 0;
};

}  // namespace

PipelineResult run_pipeline(const SceneStream& stream, const PipelineConfig& config, Segmenter* segmenter) {
  config.validate();
  OracleSegmenter oracle;
  Segmenter& seg = segmenter != nullptr ? *segmenter : oracle;

  PipelineResult result;
  const std::vector<Slot> slots = schedule(stream.size(), config);
  if (slots.empty()) return result;

  BoundedQueue<std::shared_ptr<SegRequest>> seg_queue(config.queue_capacity);
  BoundedQueue<std::shared_ptr<PoseRequest>> pose_queue(config.queue_capacity);

  std::thread seg_worker([&] {
    while (auto req = seg_queue.pop()) {
      try {
        (*req)->masks.set_value(seg.segment(SensorFrame{(*req)->stamp_us, (*req)->rendered.get()}));
      } catch (...) {
        (*req)->masks.set_exception(std::current_exception());
      }
    }
  });

  PoseStage stage(config, result);
  stage.set_first_arrival(0);
  std::exception_ptr pose_failure;
  std::thread pose_worker([&] {
    while (auto req = pose_queue.pop()) {
      if (pose_failure) continue;
      try {
        stage.process(**req);
      } catch (...) {
        pose_failure = std::current_exception();
      }
    }
  });

  std::exception_ptr intake_failure;
  try {
    for (const Slot& s : slots) {
      const synth::SceneSpec scene = stream.frame(s.frame);
      auto rendered = std::make_shared<const synth::RenderResult>(synth::render(scene, s.arrival_us));
      auto sreq = std::make_shared<SegRequest>();
      sreq->stamp_us = s.arrival_us;
      sreq->rendered = rendered;
      auto preq = std::make_shared<PoseRequest>(PoseRequest{s, scene.camera, rendered, sreq->masks.get_future().share()});
      if (!seg_queue.push(sreq) || !pose_queue.push(preq)) break;
    }
  } catch (...) {
    intake_failure = std::current_exception();
  }
  seg_queue.close();
  seg_worker.join();
  pose_queue.close();
  pose_worker.join();
  if (intake_failure) std::rethrow_exception(intake_failure);
  if (pose_failure) std::rethrow_exception(pose_failure);

  result.dropped_frames = stream.size() - slots.size();
  if (slots.size() >= 2) {
    const double span_us = static_cast<double>(slots.back().done_us - slots.front().done_us);
    if (span_us > 0) result.simulated_fps = static_cast<double>(slots.size() - 1) * 1e6 / span_us;
  }

  geom::Json tracks = geom::Json::array();
  for (const auto& t : result.tracks) {
    geom::Json j = {{"track", t.track_id}, {"teat_id", t.teat_id}, {"poses", t.poses}, {"resets", t.resets}};
    j["first_consistent_frame"] = t.first_consistent_frame ? geom::Json(*t.first_consistent_frame) : geom::Json();
    j["first_consistent_us"] = t.first_consistent_us ? geom::Json(*t.first_consistent_us) : geom::Json();
    tracks.push_back(j);
  }
  result.events.push_back({{"type", "summary"},
                           {"frames_in", stream.size()},
                           {"frames_processed", slots.size()},
                           {"dropped_frames", result.dropped_frames},
                           {"simulated_fps", result.simulated_fps},
                           {"all_gates_fired_us",
                            result.all_gates_fired_us ? geom::Json(*result.all_gates_fired_us) : geom::Json()},
                           {"invariant_violations", result.invariant_violations},
                           {"tracks", tracks}});
  return result;
}

std::string pipeline_summary_csv(const PipelineResult& result) {
  std::ostringstream out;
  out << "# teatpose-report v1\n";
  out << "track,teat_id,poses,resets,first_consistent_frame,first_consistent_us,"
         "tip_x_mm,tip_y_mm,tip_z_mm,axis_x,axis_y,axis_z\n";
  for (const auto& t : result.tracks) {
    out << t.track_id << ',' << t.teat_id << ',' << t.poses << ',' << t.resets << ',';
    if (t.first_consistent_frame) out << *t.first_consistent_frame;
    out << ',';
    if (t.first_consistent_us) out << *t.first_consistent_us;
    const auto& p = t.last_pose;
    for (int i = 0; i < 3; ++i) out << ',' << fixed(p.tip_mm[i], 4);
    for (int i = 0; i < 3; ++i) out << ',' << fixed(p.axis[i], 6);
    out << '\n';
  }
  return out.str();
}

}  // namespace teatpose::pipeline
