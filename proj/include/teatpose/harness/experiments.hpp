#pragma once

#include "teatpose/pipeline/frame_estimator.hpp"
#include "teatpose/synth/error_curve.hpp"
#include "teatpose/synth/plane_target.hpp"
#include "teatpose/synth/scene.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace teatpose::harness {

inline constexpr double kSuccessThresholdMm = 5.0;

/// Moves the camera by up to `translation_mm` per axis and tilts it by up
/// to `rotation_deg` about a random axis. Deterministic in (seed, cycle).
geom::CameraModel perturb_camera(const geom::CameraModel& camera, std::uint64_t seed, std::uint64_t cycle,
                                 double translation_mm, double rotation_deg);

struct RepeatabilityOptions {
  synth::SceneSpec scene;  // its noise is replaced by `noise`
  synth::NoiseModel noise;
  std::size_t cycles = 789;
  std::uint64_t seed = 1;
  double perturb_translation_mm = 20.0;
  double perturb_rotation_deg = 2.0;
  pipeline::GeometryParams geometry;
};

/// One teat in one cycle. A failed estimate has no error values.
struct Sample {
  std::size_t cycle = 0;
  std::string teat_id;
  std::optional<double> tip_error_mm;
  std::optional<double> axis_error_deg;
};

struct TeatRow {
  std::string teat_id;
  std::size_t samples = 0;
  std::size_t estimated = 0;
  double mean_error_mm = 0.0;  // over estimated samples
  double std_error_mm = 0.0;
  double mean_axis_error_deg = 0.0;
  double success_rate = 0.0;  // error < 5 mm over all samples
};

struct TimingRow {
  std::string stage;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
};

struct ExperimentReport {
  std::size_t cycles = 0;
  std::vector<Sample> samples;  // cycle-major, teat order within a cycle
  std::vector<TeatRow> teats;
  double success_rate = 0.0;
  std::vector<TimingRow> timing;  // wall clock, not reproducible
};

/// Per-teat rows re-derived from raw samples. Teats appear in first-seen order.
std::vector<TeatRow> summarize(const std::vector<Sample>& samples, double* overall_success = nullptr);

ExperimentReport cmd_repeatability(const RepeatabilityOptions& options);

struct NamedNoise {
  std::string name;
  synth::NoiseModel noise;
};

struct CurveOptions {
  std::vector<NamedNoise> presets;
  std::vector<double> distances_mm{200, 400, 600, 800, 1000, 1200, 1400};
  std::uint64_t seed = 1;
  synth::PlaneTarget target;
};

struct CurveRow {
  std::string preset;
  double distance_mm = 0.0;
  std::size_t points = 0;
  std::optional<double> measured_mm;  // mean depth; empty when too few points
  std::optional<double> error_mm;     // per-point rms error
};

struct CurveFit {
  std::string preset;
  synth::NoiseModel truth;
  std::optional<synth::ErrorCurve> fit;
  std::string warning;
};

struct CurveReport {
  std::vector<CurveRow> rows;
  std::vector<CurveFit> fits;
};

/// Throws invalid_parameter with fewer than 3 distances.
CurveReport cmd_camera_curve(const CurveOptions& options);

struct RateOptions {
  synth::SceneSpec scene;
  std::vector<int> strides{1, 10};
  std::size_t repeats = 20;
  pipeline::GeometryParams geometry;
};

struct RateRow {
  int stride = 1;
  std::size_t contour_vertices = 0;  // summed over masks after subsampling
  std::size_t extracted_points = 0;
  double max_tip_delta_mm = 0.0;  // vs stride 1, over teats estimated by both
  std::size_t teats_estimated = 0;
  // wall clock
  double extract_mean_ms = 0.0;
  double extract_p95_ms = 0.0;
  double geometry_mean_ms = 0.0;
  double geometry_p95_ms = 0.0;
};

struct RateReport {
  std::vector<RateRow> rows;
};

RateReport cmd_rate_bench(const RateOptions& options);

}  // namespace teatpose::harness
