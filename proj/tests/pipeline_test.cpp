#include "teatpose/errors.hpp"
#include "teatpose/pipeline/approach.hpp"
#include "teatpose/pipeline/association.hpp"
#include "teatpose/pipeline/bounded_queue.hpp"
#include "teatpose/pipeline/frame_estimator.hpp"
#include "teatpose/pipeline/gate.hpp"
#include "teatpose/pipeline/pipeline.hpp"
#include "teatpose/synth/render.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <thread>

using namespace teatpose;
using namespace teatpose::pipeline;
namespace tk = teatpose::testkit;
using tk::Rng;
using tk::uniform;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected teatpose::Error";
  return ErrorCode::invalid_input;
}

pose::TeatPose make_pose(const Vec3& tip, const Vec3& axis = Vec3::UnitZ(), const std::string& id = "T1") {
  pose::TeatPose p;
  p.teat_id = id;
  p.tip_mm = tip;
  p.axis = axis.normalized();
  return p;
}

double angle_deg(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

bool agree(const pose::TeatPose& a, const pose::TeatPose& b, const GateParams& g) {
  return (a.tip_mm - b.tip_mm).norm() <= g.pos_tol_mm && angle_deg(a.axis, b.axis) <= g.axis_tol_deg;
}

// Replays a pose history from scratch: the window at step k is the longest
// run of trailing poses (capped at M) started after the last reset; a
// reset happens when the new pose disagrees with anything in that run.
std::vector<GateDecision> gate_oracle(const std::vector<pose::TeatPose>& poses, const GateParams& g) {
  std::vector<GateDecision> out;
  std::size_t run_start = 0;
  for (std::size_t k = 0; k < poses.size(); ++k) {
    const std::size_t from = std::max(run_start, k + 1 >= g.window ? k + 1 - g.window : 0);
    bool ok = true;
    for (std::size_t j = from; j < k; ++j) ok = ok && agree(poses[j], poses[k], g);
    if (!ok) {
      run_start = k;
      out.push_back(GateDecision::reset);
    } else {
      out.push_back(k + 1 - run_start >= g.window ? GateDecision::consistent : GateDecision::pending);
    }
  }
  return out;
}

synth::SceneSpec clean_scene() { return synth::default_scene(1, synth::noise_preset("none")); }

PipelineConfig fast_config() {
  PipelineConfig c;
  c.geometry.contour_stride = 10;
  return c;
}

std::string dump_events(const PipelineResult& r) {
  std::string s;
  for (const auto& e : r.events) s += e.dump() + "\n";
  return s;
}

std::vector<geom::Json> events_of_type(const PipelineResult& r, const std::string& type) {
  std::vector<geom::Json> out;
  for (const auto& e : r.events)
    if (e.at("type") == type) out.push_back(e);
  return out;
}

struct Processed {
  std::size_t frame;
  std::int64_t done_ms;
};

// Millisecond tick simulation of the two freshest-frame-wins stages;
// latencies and frame period must be whole milliseconds.
std::vector<Processed> tick_schedule(std::size_t n, int period_ms, int seg_ms, int geo_ms) {
  std::optional<std::size_t> newest_frame, seg_job, newest_masks, pose_job;
  std::size_t frames_taken = 0;  // frames < this are consumed or dropped
  std::size_t masks_taken = 0;
  int seg_done = 0, pose_done = 0;
  std::vector<Processed> out;
  const int horizon = static_cast<int>(n) * period_ms + 10 * (seg_ms + geo_ms);
  for (int t = 0; t <= horizon; ++t) {
    if (seg_job && t == seg_done) {
      newest_masks = seg_job;
      seg_job.reset();
    }
    if (pose_job && t == pose_done) {
      out.push_back({*pose_job, t});
      pose_job.reset();
    }
    if (t % period_ms == 0 && static_cast<std::size_t>(t / period_ms) < n) newest_frame = t / period_ms;
    if (!seg_job && newest_frame && *newest_frame >= frames_taken) {
      seg_job = newest_frame;
      frames_taken = *newest_frame + 1;
      seg_done = t + seg_ms;
    }
    if (!pose_job && newest_masks && *newest_masks >= masks_taken) {
      pose_job = newest_masks;
      masks_taken = *newest_masks + 1;
      pose_done = t + geo_ms;
    }
  }
  return out;
}

class StaleSegmenter : public Segmenter {
 public:
  std::vector<geom::TeatMask> segment(const SensorFrame& frame) override {
    std::vector<geom::TeatMask> masks;
    for (const auto& m : frame.rendered->masks) masks.push_back(m.with_stamp(frame.stamp_us - 1));
    return masks;
  }
};

class FailingSegmenter : public Segmenter {
 public:
  std::vector<geom::TeatMask> segment(const SensorFrame&) override {
    throw Error(ErrorCode::invalid_input, "segmentation node offline");
  }
};

}  // namespace

// ---------------------------------------------------------------- gate

TEST(Gate, WindowOfThreeExample) {
  ConsistencyGate gate({3, 3.0, 5.0});
  EXPECT_EQ(gate.update(make_pose({0, 0, 0})), GateDecision::pending);
  EXPECT_EQ(gate.update(make_pose({1, 0, 0})), GateDecision::pending);
  EXPECT_EQ(gate.update(make_pose({0, 1, 0})), GateDecision::consistent);
  EXPECT_EQ(gate.update(make_pose({0.5, 0.5, 0})), GateDecision::consistent);
  EXPECT_EQ(gate.window().size(), 3u);
  EXPECT_EQ(gate.update(make_pose({20, 0, 0})), GateDecision::reset);
  EXPECT_EQ(gate.window().size(), 1u);
  EXPECT_EQ(gate.update(make_pose({20, 1, 0})), GateDecision::pending);
  EXPECT_EQ(gate.update(make_pose({20, 2, 0})), GateDecision::consistent);
}

TEST(Gate, AxisToleranceMatters) {
  ConsistencyGate gate({2, 3.0, 5.0});
  EXPECT_EQ(gate.update(make_pose({0, 0, 0}, Vec3::UnitZ())), GateDecision::pending);
  const double a = 4.0 * std::numbers::pi / 180.0;
  EXPECT_EQ(gate.update(make_pose({0, 0, 0}, Vec3(std::sin(a), 0, std::cos(a)))), GateDecision::consistent);
  EXPECT_EQ(gate.update(make_pose({0, 0, 0}, -Vec3::UnitZ())), GateDecision::reset);
  EXPECT_STREQ(std::string(to_string(GateDecision::consistent)).c_str(), "consistent");
  EXPECT_TRUE(gate_update(gate, make_pose({0, 0, 0}, -Vec3::UnitZ())) == GateDecision::consistent);
}

TEST(Gate, InvalidParameters) {
  EXPECT_EQ(code_of([] { ConsistencyGate({1, 3.0, 5.0}); }), ErrorCode::invalid_parameter);
  EXPECT_EQ(code_of([] { ConsistencyGate({5, 0.0, 5.0}); }), ErrorCode::invalid_parameter);
  EXPECT_EQ(code_of([] { ConsistencyGate({5, 3.0, -1.0}); }), ErrorCode::invalid_parameter);
}

TEST(Gate, MatchesReplayOracleOnRandomStreams) {
  Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const GateParams g{static_cast<std::size_t>(2 + trial % 6), uniform(rng, 0.5, 4.0), uniform(rng, 1.0, 8.0)};
    std::vector<pose::TeatPose> poses;
    Vec3 center = Vec3::Zero();
    Vec3 axis = Vec3::UnitZ();
    for (int k = 0; k < 60; ++k) {
      if (uniform(rng, 0, 1) < 0.08) center += tk::random_unit(rng) * 20.0;
      if (uniform(rng, 0, 1) < 0.05) axis = tk::tilt(rng, axis, 15.0);
      const Vec3 tip = center + tk::random_unit(rng) * uniform(rng, 0.0, 0.8 * g.pos_tol_mm);
      poses.push_back(make_pose(tip, tk::tilt(rng, axis, 0.4 * g.axis_tol_deg)));
    }
    const auto expected = gate_oracle(poses, g);
    ConsistencyGate gate(g);
    for (std::size_t k = 0; k < poses.size(); ++k) {
      ASSERT_EQ(gate.update(poses[k]), expected[k]) << "trial " << trial << " step " << k;
      const auto& w = gate.window();
      ASSERT_LE(w.size(), g.window);
      for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j) ASSERT_TRUE(agree(w[i], w[j], g));
    }
  }
}

TEST(Gate, AgreeingStreamNeverResetsAndFiresAtWindow) {
  Rng rng(42);
  for (std::size_t m = 2; m <= 8; ++m) {
    ConsistencyGate gate({m, 3.0, 5.0});
    for (std::size_t k = 0; k < 40; ++k) {
      const auto d = gate.update(make_pose(tk::random_unit(rng) * 1.4, tk::tilt(rng, Vec3::UnitZ(), 2.4)));
      ASSERT_NE(d, GateDecision::reset);
      EXPECT_EQ(d == GateDecision::consistent, k + 1 >= m);
    }
  }
}

// ---------------------------------------------------------------- approach

TEST(Approach, StandoffBelowTip) {
  const auto plan = approach_plan(make_pose(Vec3::Zero(), Vec3::UnitZ()), 50.0);
  EXPECT_LT((plan[0] - Vec3(0, 0, -50)).norm(), 1e-12);
  EXPECT_LT(plan[1].norm(), 1e-12);
}

TEST(Approach, TiltedTeatApproachIsAlongAxis) {
  const double a = 30.0 * std::numbers::pi / 180.0;
  const Vec3 axis(std::sin(a), 0.0, std::cos(a));
  const Vec3 tip(12.0, -40.0, -250.0);
  const auto plan = approach_plan(make_pose(tip, axis), 50.0);
  const Vec3 dir = plan[1] - plan[0];
  EXPECT_NEAR(dir.norm(), 50.0, 1e-9);
  EXPECT_LT(dir.normalized().cross(axis).norm(), 1e-9);
  EXPECT_GT(dir.dot(axis), 0.0);
  EXPECT_LT((plan[1] - tip).norm(), 1e-12);
}

// ---------------------------------------------------------------- association

TEST(Association, StableTracksAcrossFrames) {
  TrackAssociator assoc(15.0);
  const std::vector<pose::TeatPose> frame1{make_pose({0, 0, 0}, Vec3::UnitZ(), "A"),
                                           make_pose({60, 0, 0}, Vec3::UnitZ(), "B")};
  const auto r1 = assoc.associate(frame1);
  ASSERT_EQ(r1.track_ids.size(), 2u);
  EXPECT_NE(r1.track_ids[0], r1.track_ids[1]);
  // Same teats, reversed order, different mask ids, small motion.
  const std::vector<pose::TeatPose> frame2{make_pose({61, 1, 0}, Vec3::UnitZ(), "x"),
                                           make_pose({1, -1, 0}, Vec3::UnitZ(), "y")};
  const auto r2 = assoc.associate(frame2);
  EXPECT_EQ(r2.track_ids[0], r1.track_ids[1]);
  EXPECT_EQ(r2.track_ids[1], r1.track_ids[0]);
  EXPECT_TRUE(r2.expired.empty());
}

TEST(Association, LargeJumpFallsBackToTeatId) {
  TrackAssociator assoc(15.0);
  const auto r1 = assoc.associate({make_pose({0, 0, 0}, Vec3::UnitZ(), "T1")});
  const auto r2 = assoc.associate({make_pose({20, 0, 0}, Vec3::UnitZ(), "T1")});
  EXPECT_EQ(r2.track_ids[0], r1.track_ids[0]);
  const auto r3 = assoc.associate({make_pose({100, 0, 0}, Vec3::UnitZ(), "T9")});
  EXPECT_NE(r3.track_ids[0], r1.track_ids[0]);
}

TEST(Association, TrackSurvivesOneMissedFrameThenExpires) {
  TrackAssociator assoc(15.0);
  const auto id = assoc.associate({make_pose({0, 0, 0})}).track_ids[0];
  EXPECT_TRUE(assoc.associate({}).expired.empty());
  const auto back = assoc.associate({make_pose({1, 0, 0})});
  EXPECT_EQ(back.track_ids[0], id);
  EXPECT_TRUE(assoc.associate({}).expired.empty());
  const auto gone = assoc.associate({});
  ASSERT_EQ(gone.expired.size(), 1u);
  EXPECT_EQ(gone.expired[0], id);
  EXPECT_NE(assoc.associate({make_pose({0, 0, 0})}).track_ids[0], id);
}

TEST(Association, GreedyNearestFirst) {
  TrackAssociator assoc(15.0);
  const auto r1 = assoc.associate({make_pose({0, 0, 0}, Vec3::UnitZ(), ""), make_pose({10, 0, 0}, Vec3::UnitZ(), "")});
  const auto r2 = assoc.associate({make_pose({9, 0, 0}, Vec3::UnitZ(), "")});
  EXPECT_EQ(r2.track_ids[0], r1.track_ids[1]);
}

// ---------------------------------------------------------------- queue

TEST(BoundedQueue, FifoAcrossThreadsWithBackpressure) {
  BoundedQueue<int> q(2);
  std::vector<int> got;
  std::thread consumer([&] {
    while (auto v = q.pop()) got.push_back(*v);
  });
  for (int i = 0; i < 1000; ++i) ASSERT_TRUE(q.push(i));
  q.close();
  consumer.join();
  ASSERT_EQ(got.size(), 1000u);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(got[i], i);
  EXPECT_FALSE(q.push(1));
}

TEST(BoundedQueue, CloseDrainsThenEnds) {
  BoundedQueue<std::string> q(0);
  EXPECT_EQ(q.capacity(), 1u);
  EXPECT_TRUE(q.push("a"));
  q.close();
  EXPECT_EQ(q.pop().value(), "a");
  EXPECT_FALSE(q.pop().has_value());
}

// ---------------------------------------------------------------- config

TEST(Config, JsonRoundTripAndDefaults) {
  PipelineConfig c;
  c.latency.inference_ms = 120.0;
  c.gate.window = 7;
  c.geometry.contour_stride = 4;
  c.geometry.pose.method = pose::AxisMethod::normals;
  c.camera_fps = 15.0;
  c.queue_capacity = 3;
  const PipelineConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back).dump(), config_to_json(c).dump());
  EXPECT_EQ(back.gate.window, 7u);
  EXPECT_EQ(back.geometry.pose.method, pose::AxisMethod::normals);

  const PipelineConfig partial = config_from_json(geom::Json::parse(R"({"latency": {"network_ms": 10}})"));
  EXPECT_EQ(partial.latency.network_ms, 10.0);
  EXPECT_EQ(partial.latency.inference_ms, 150.0);
  EXPECT_EQ(partial.gate.window, 5u);
  EXPECT_EQ(partial.camera_fps, 30.0);
}

TEST(Config, InvalidValuesAndParseErrors) {
  EXPECT_EQ(code_of([] { config_from_json(geom::Json::parse(R"({"camera_fps": 0})")); }),
            ErrorCode::invalid_parameter);
  EXPECT_EQ(code_of([] { config_from_json(geom::Json::parse(R"({"latency": {"inference_ms": -1}})")); }),
            ErrorCode::invalid_parameter);
  EXPECT_EQ(code_of([] { config_from_json(geom::Json::parse(R"({"gate": {"window": "five"}})")); }),
            ErrorCode::parse_error);
  PipelineConfig c;
  c.geometry.contour_stride = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::invalid_parameter);
}

// ---------------------------------------------------------------- frame estimator

TEST(FrameEstimator, StampMismatchIsRejected) {
  const auto r = synth::render(clean_scene(), 100);
  GeometryParams params;
  params.contour_stride = 10;
  EXPECT_EQ(code_of([&] { estimate_frame(r.cloud, r.masks, clean_scene().camera, params, 101); }),
            ErrorCode::invalid_input);
  const auto est = estimate_frame(r.cloud, r.masks, clean_scene().camera, params, 100);
  ASSERT_EQ(est.teats.size(), r.masks.size());
  for (std::size_t i = 0; i < est.teats.size(); ++i) {
    EXPECT_EQ(est.teats[i].teat_id, r.masks[i].teat_id());
    ASSERT_TRUE(est.teats[i].pose.has_value());
    EXPECT_EQ(est.teats[i].pose->stamp_us, 100);
  }
}

// ---------------------------------------------------------------- pipeline

TEST(Pipeline, NoiselessStaticSceneFiresOnFifthProcessedFrame) {
  const PipelineResult r = run_pipeline(StaticSceneStream(clean_scene(), 50), fast_config());
  ASSERT_GE(r.frames.size(), 5u);
  ASSERT_EQ(r.tracks.size(), 4u);
  for (const auto& t : r.tracks) {
    ASSERT_TRUE(t.first_consistent_frame.has_value()) << t.track_id;
    EXPECT_EQ(*t.first_consistent_frame, r.frames[4].frame);
    EXPECT_EQ(t.resets, 0u);
  }
  ASSERT_TRUE(r.all_gates_fired_us.has_value());
  EXPECT_EQ(*r.all_gates_fired_us, r.frames[4].done_us);
  EXPECT_EQ(r.invariant_violations, 0u);
  EXPECT_TRUE(events_of_type(r, "error").empty());
  // The plan events start with the fifth processed frame.
  const auto plans = events_of_type(r, "plan");
  ASSERT_FALSE(plans.empty());
  EXPECT_EQ(plans.front().at("frame").get<std::size_t>(), r.frames[4].frame);
}

TEST(Pipeline, DefaultLatenciesGiveFiveFramesPerSecond) {
  const PipelineResult r = run_pipeline(StaticSceneStream(clean_scene(), 55), fast_config());
  EXPECT_DOUBLE_EQ(r.simulated_fps, 5.0);
  ASSERT_EQ(r.frames.size(), 10u);
  for (std::size_t k = 0; k < r.frames.size(); ++k) {
    EXPECT_EQ(r.frames[k].frame, 6 * k);
    EXPECT_EQ(r.frames[k].dropped_before, k == 0 ? 0u : 5u);
    EXPECT_EQ(r.frames[k].done_us - r.frames[k].arrival_us, 250000);
  }
  EXPECT_EQ(r.dropped_frames, 45u);
  const auto summary = events_of_type(r, "summary");
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_EQ(summary[0].at("frames_processed").get<std::size_t>(), 10u);
}

TEST(Pipeline, ScheduleMatchesTickSimulation) {
  struct Case {
    double fps;
    int period_ms, inference, network, geometry;
  };
  const Case cases[] = {{40.0, 25, 150, 50, 50}, {40.0, 25, 60, 0, 140}, {20.0, 50, 10, 5, 20}, {40.0, 25, 100, 30, 130}};
  for (const Case& c : cases) {
    PipelineConfig config = fast_config();
    config.camera_fps = c.fps;
    config.latency = {static_cast<double>(c.inference), static_cast<double>(c.network), static_cast<double>(c.geometry)};
    const std::size_t n = 24;
    const PipelineResult r = run_pipeline(StaticSceneStream(clean_scene(), n), config);
    const auto expected = tick_schedule(n, c.period_ms, c.inference + c.network, c.geometry);
    ASSERT_EQ(r.frames.size(), expected.size()) << c.inference << "/" << c.geometry;
    std::size_t previous = 0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      EXPECT_EQ(r.frames[k].frame, expected[k].frame);
      EXPECT_EQ(r.frames[k].done_us, expected[k].done_ms * 1000);
      EXPECT_EQ(r.frames[k].dropped_before, k == 0 ? expected[k].frame : expected[k].frame - previous - 1);
      previous = expected[k].frame;
    }
    EXPECT_EQ(r.dropped_frames, n - expected.size());
  }
}

TEST(Pipeline, TwentyMillimeterJumpResetsOnlyThatTeat) {
  const synth::SceneSpec base = clean_scene();
  FunctionSceneStream stream(60, [&](std::size_t i) {
    synth::SceneSpec s = base;
    s.seed = base.seed + i;
    if (i >= 30) s.teats[0].base_mm.x() -= 20.0;
    return s;
  });
  const PipelineResult r = run_pipeline(stream, fast_config());
  ASSERT_EQ(r.tracks.size(), 4u);
  for (const auto& t : r.tracks) {
    EXPECT_EQ(t.resets, t.teat_id == "T1" ? 1u : 0u) << t.teat_id;
    ASSERT_TRUE(t.first_consistent_frame.has_value());
  }
  std::size_t resets = 0;
  for (const auto& e : events_of_type(r, "gate")) {
    if (e.at("decision") == "reset") {
      ++resets;
      EXPECT_EQ(e.at("frame").get<std::size_t>(), 30u);
    }
  }
  EXPECT_EQ(resets, 1u);
  EXPECT_EQ(r.invariant_violations, 0u);
}

TEST(Pipeline, EventLogIsDeterministic) {
  const synth::SceneSpec noisy = synth::default_scene(3);
  const PipelineResult a = run_pipeline(StaticSceneStream(noisy, 40), fast_config());
  const PipelineResult b = run_pipeline(StaticSceneStream(noisy, 40), fast_config());
  EXPECT_EQ(dump_events(a), dump_events(b));
  EXPECT_EQ(pipeline_summary_csv(a), pipeline_summary_csv(b));
}

TEST(Pipeline, StampMismatchCountsViolations) {
  StaleSegmenter stale;
  const PipelineResult r = run_pipeline(StaticSceneStream(clean_scene(), 30), fast_config(), &stale);
  EXPECT_EQ(r.invariant_violations, r.frames.size());
  EXPECT_EQ(events_of_type(r, "violation").size(), r.frames.size());
  EXPECT_TRUE(events_of_type(r, "pose").empty());
  EXPECT_FALSE(r.all_gates_fired_us.has_value());
}

TEST(Pipeline, SegmentationFailureBecomesErrorEvents) {
  FailingSegmenter failing;
  const PipelineResult r = run_pipeline(StaticSceneStream(clean_scene(), 20), fast_config(), &failing);
  const auto errors = events_of_type(r, "error");
  EXPECT_EQ(errors.size(), r.frames.size());
  for (const auto& e : errors) EXPECT_EQ(e.at("code"), "invalid-input");
  EXPECT_TRUE(r.tracks.empty());
}

TEST(Pipeline, OccludedTeatIsReportedMissing) {
  const auto rendered = synth::render(clean_scene());
  OracleSegmenter occluding({{0, 0, 640, 480}});
  const PipelineResult r = run_pipeline(StaticSceneStream(clean_scene(), 12), fast_config(), &occluding);
  EXPECT_TRUE(r.tracks.empty());
  for (const auto& e : events_of_type(r, "frame")) EXPECT_EQ(e.at("masks").get<std::size_t>(), 0u);
}

TEST(Pipeline, SummaryCsvHasHeaderAndOneRowPerTrack) {
  const PipelineResult r = run_pipeline(StaticSceneStream(clean_scene(), 30), fast_config());
  const std::string csv = pipeline_summary_csv(r);
  EXPECT_EQ(csv.rfind("# teatpose-report v1\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.tracks.size() + 2);
}

TEST(Pipeline, EmptyStreamAndInvalidConfig) {
  const PipelineResult r = run_pipeline(StaticSceneStream(clean_scene(), 0), fast_config());
  EXPECT_TRUE(r.frames.empty());
  PipelineConfig bad = fast_config();
  bad.camera_fps = -1.0;
  EXPECT_EQ(code_of([&] { run_pipeline(StaticSceneStream(clean_scene(), 5), bad); }), ErrorCode::invalid_parameter);
}
