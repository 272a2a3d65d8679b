#include "teatpose/harness/experiments.hpp"

#include "teatpose/errors.hpp"
#include "teatpose/harness/stats.hpp"
#include "teatpose/pose/teat_pose.hpp"
#include "teatpose/synth/render.hpp"
#include "teatpose/synth/rng.hpp"

#include <Eigen/Geometry>

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>

namespace teatpose::harness {

namespace {

// Stream ids for the perturbation draws.
constexpr std::uint64_t kStreamShift = 101;
constexpr std::uint64_t kStreamTilt = 104;

}  // namespace

geom::CameraModel perturb_camera(const geom::CameraModel& camera, std::uint64_t seed, std::uint64_t cycle,
                                 double translation_mm, double rotation_deg) {
  const synth::CounterRng rng(seed);
  auto signed_unit = [&](std::uint64_t stream, std::uint64_t k) { return 2.0 * rng.uniform(stream, 8 * cycle + k) - 1.0; };

  const Vec3 shift{signed_unit(kStreamShift, 0), signed_unit(kStreamShift, 1), signed_unit(kStreamShift, 2)};
  Vec3 tilt_axis{rng.gaussian(kStreamTilt, 3 * cycle), rng.gaussian(kStreamTilt, 3 * cycle + 1),
                 rng.gaussian(kStreamTilt, 3 * cycle + 2)};
  if (tilt_axis.norm() < 1e-12) tilt_axis = Vec3::UnitX();
  const double angle = signed_unit(kStreamShift, 3) * rotation_deg * std::numbers::pi / 180.0;
  const Mat3 tilt = Eigen::AngleAxisd(angle, tilt_axis.normalized()).toRotationMatrix();

  const auto& ext = camera.extrinsic();
  Mat3 rotation = tilt * ext.rotation();
  // Re-orthonormalize so accumulated rounding never trips validation.
  const Eigen::JacobiSVD<Mat3> svd(rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  rotation = svd.matrixU() * svd.matrixV().transpose();
  return camera.with_extrinsic(geom::RigidTransform(rotation, ext.translation() + translation_mm * shift));
}

std::vector<TeatRow> summarize(const std::vector<Sample>& samples, double* overall_success) {
  std::vector<TeatRow> rows;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> errors, axis_errors;
  std::vector<std::size_t> successes;
  std::size_t total_success = 0;
  for (const auto& s : samples) {
    auto [it, inserted] = index.try_emplace(s.teat_id, rows.size());
    if (inserted) {
      rows.push_back(TeatRow{s.teat_id});
      errors.emplace_back();
      axis_errors.emplace_back();
      successes.push_back(0);
    }
    const std::size_t k = it->second;
    ++rows[k].samples;
    if (s.tip_error_mm) {
      ++rows[k].estimated;
      errors[k].push_back(*s.tip_error_mm);
      if (s.axis_error_deg) axis_errors[k].push_back(*s.axis_error_deg);
      if (*s.tip_error_mm < kSuccessThresholdMm) {
        ++successes[k];
        ++total_success;
      }
    }
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].mean_error_mm = errors[k].empty() ? 0.0 : mean(errors[k]);
    rows[k].std_error_mm = sample_std(errors[k]);
    rows[k].mean_axis_error_deg = axis_errors[k].empty() ? 0.0 : mean(axis_errors[k]);
    rows[k].success_rate = static_cast<double>(successes[k]) / static_cast<double>(rows[k].samples);
  }
  if (overall_success != nullptr) {
    *overall_success = samples.empty() ? 0.0 : static_cast<double>(total_success) / static_cast<double>(samples.size());
  }
  return rows;
}

ExperimentReport cmd_repeatability(const RepeatabilityOptions& options) {
  if (options.cycles < 1) throw Error(ErrorCode::invalid_parameter, "cycles must be >= 1");
  options.noise.validate();

  ExperimentReport report;
  report.cycles = options.cycles;
  std::vector<double> extract, voxel, pose, total;
  for (std::size_t c = 0; c < options.cycles; ++c) {
    synth::SceneSpec scene = options.scene;
    scene.noise = options.noise;
    scene.seed = options.seed + c;
    scene.camera = perturb_camera(options.scene.camera, options.seed, c, options.perturb_translation_mm,
                                  options.perturb_rotation_deg);
    const auto stamp = static_cast<std::int64_t>(c);
    const synth::RenderResult rendered = synth::render(scene, stamp);
    const auto est = pipeline::estimate_frame(rendered.cloud, rendered.masks, scene.camera, options.geometry, stamp);

    extract.push_back(est.timings.extract_ms);
    voxel.push_back(est.timings.voxel_ms);
    pose.push_back(est.timings.pose_ms);
    total.push_back(est.timings.total_ms());

    // Every ground-truth teat gets a sample, detected or not.
    for (const auto& truth : rendered.truth.teats) {
      Sample s{c, truth.teat_id, std::nullopt, std::nullopt};
      for (const auto& outcome : est.teats) {
        if (outcome.teat_id != truth.teat_id || !outcome.pose) continue;
        s.tip_error_mm = (outcome.pose->tip_mm - truth.tip_mm).norm();
        s.axis_error_deg = pose::axis_angle_deg(outcome.pose->axis, truth.axis);
      }
      report.samples.push_back(std::move(s));
    }
  }
  report.teats = summarize(report.samples, &report.success_rate);

  auto timing = [](std::string stage, const std::vector<double>& v) {
    return TimingRow{std::move(stage), mean(v), percentile(v, 50), percentile(v, 95)};
  };
  report.timing = {timing("extract", extract), timing("voxel", voxel), timing("pose", pose), timing("total", total)};
  return report;
}

CurveReport cmd_camera_curve(const CurveOptions& options) {
  if (options.distances_mm.size() < 3) throw Error(ErrorCode::invalid_parameter, "camera curve needs >= 3 distances");
  CurveReport report;
  const geom::CameraModel camera = synth::default_camera();
  for (std::size_t p = 0; p < options.presets.size(); ++p) {
    const auto& preset = options.presets[p];
    preset.noise.validate();
    std::vector<synth::ErrorSample> samples;
    for (std::size_t d = 0; d < options.distances_mm.size(); ++d) {
      synth::PlaneTarget target = options.target;
      target.distance_mm = options.distances_mm[d];
      const std::uint64_t seed = synth::CounterRng::mix(options.seed + 1000003ULL * p) + d;
      const geom::PointCloud cloud = synth::render_plane_target(camera, target, preset.noise, seed);
      CurveRow row{preset.name, target.distance_mm, cloud.size(), std::nullopt, std::nullopt};
      try {
        row.measured_mm = synth::plane_target_measure(cloud);
        row.error_mm = synth::plane_target_rms_error(cloud, target.distance_mm);
        samples.push_back({target.distance_mm, *row.error_mm});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::insufficient_points) throw;
      }
      report.rows.push_back(row);
    }
    CurveFit fit{preset.name, preset.noise, std::nullopt, ""};
    try {
      fit.fit = synth::fit_error_curve(samples);
    } catch (const Error& e) {
      fit.warning = e.what();
    }
    if (samples.size() < options.distances_mm.size()) {
      if (!fit.warning.empty()) fit.warning += "; ";
      fit.warning += std::to_string(options.distances_mm.size() - samples.size()) + " distance(s) had too few points";
    }
    report.fits.push_back(std::move(fit));
  }
  return report;
}

RateReport cmd_rate_bench(const RateOptions& options) {
  if (options.strides.empty()) throw Error(ErrorCode::invalid_parameter, "no strides given");
  const synth::RenderResult rendered = synth::render(options.scene, 0);
  const auto& camera = options.scene.camera;

  auto run = [&](int stride) {
    pipeline::GeometryParams g = options.geometry;
    g.contour_stride = stride;
    return pipeline::estimate_frame(rendered.cloud, rendered.masks, camera, g, 0);
  };

  const auto reference = run(1);
  RateReport report;
  for (int stride : options.strides) {
    if (stride < 1) throw Error(ErrorCode::invalid_parameter, "stride must be >= 1");
    RateRow row;
    row.stride = stride;
    for (const auto& m : rendered.masks) row.contour_vertices += geom::subsample_contour(m.contour(), stride).size();

    std::vector<double> extract, full;
    pipeline::FrameEstimate est;
    const std::size_t repeats = std::max<std::size_t>(options.repeats, 1);
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      est = run(stride);
      const auto t1 = std::chrono::steady_clock::now();
      extract.push_back(est.timings.extract_ms);
      full.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    row.extract_mean_ms = mean(extract);
    row.extract_p95_ms = percentile(extract, 95);
    row.geometry_mean_ms = mean(full);
    row.geometry_p95_ms = percentile(full, 95);

    for (std::size_t i = 0; i < est.teats.size(); ++i) {
      const auto& t = est.teats[i];
      row.extracted_points += t.extracted_points;
      if (!t.pose) continue;
      ++row.teats_estimated;
      for (const auto& r : reference.teats) {
        if (r.teat_id == t.teat_id && r.pose) {
          row.max_tip_delta_mm = std::max(row.max_tip_delta_mm, (t.pose->tip_mm - r.pose->tip_mm).norm());
        }
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace teatpose::harness
