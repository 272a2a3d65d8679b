#include "teatpose/errors.hpp"
#include "teatpose/pipeline/frame_estimator.hpp"
#include "teatpose/pose/axis_estimation.hpp"
#include "teatpose/pose/capsule_fit.hpp"
#include "teatpose/pose/direction.hpp"
#include "teatpose/pose/pose_estimator.hpp"
#include "teatpose/pose/tip.hpp"
#include "teatpose/synth/render.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace teatpose;
using namespace teatpose::pose;
namespace tk = teatpose::testkit;
using geom::Frame;
using geom::PointCloud;
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

double sign_free_distance(const Vec3& a, const Vec3& b) { return std::min((a - b).norm(), (a + b).norm()); }

Vec3 power_iteration_top(const Mat3& m) {
  Vec3 v(1.0, 0.7, 0.3);
  for (int i = 0; i < 5000; ++i) v = (m * v).normalized();
  return v;
}

Mat3 covariance(const PointCloud& c) {
  const Vec3 mu = c.centroid();
  Mat3 cov = Mat3::Zero();
  for (const auto& p : c.points()) cov += (p - mu) * (p - mu).transpose();
  return cov / static_cast<double>(c.size());
}

// Fibonacci sphere (upper hemisphere suffices for sign-free axes).
Vec3 grid_search_normals_axis(const std::vector<Vec3>& normals, int samples) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  double best = 1e300;
  Vec3 best_dir = Vec3::UnitZ();
  for (int i = 0; i < samples; ++i) {
    const double z = 1.0 - (i + 0.5) / samples;  // (0, 1]
    const double r = std::sqrt(1.0 - z * z);
    const Vec3 d(r * std::cos(golden * i), r * std::sin(golden * i), z);
    double cost = 0.0;
    for (const auto& n : normals) cost += n.dot(d) * n.dot(d);
    if (cost < best) {
      best = cost;
      best_dir = d;
    }
  }
  return best_dir;
}

PointCloud with_noise(Rng& rng, const std::vector<Vec3>& pts, double sigma) {
  std::normal_distribution<double> n(0.0, sigma);
  std::vector<Vec3> out(pts);
  for (auto& p : out) p += Vec3(n(rng), n(rng), n(rng));
  return PointCloud(Frame::world, std::move(out));
}

synth::SceneSpec vertical_teat_scene() {
  synth::SceneSpec scene = synth::default_scene(1, synth::noise_preset("none"));
  scene.teats = {synth::TeatSpec{Vec3(0, 0, -54), -Vec3::UnitZ(), 50.0, 14.0}};
  return scene;
}

}  // namespace

// --- PCA ----------------------------------------------------------------------

TEST(PcaAxis, CollinearSegment) {
  std::vector<Vec3> pts;
  for (int i = 0; i <= 100; ++i) pts.emplace_back(0, 0, i);
  EXPECT_LT(sign_free_distance(pca_axis(PointCloud(Frame::world, pts)), Vec3::UnitZ()), 1e-12);
}

TEST(PcaAxis, NoiselessCylinder) {
  const auto pts = tk::cylinder_grid(Vec3(10, 20, 30), Vec3::UnitY(), 15.0, 60.0, 1.0);
  EXPECT_LT(axis_angle_deg(pca_axis(PointCloud(Frame::world, pts)), Vec3::UnitY()), 0.1);
}

TEST(PcaAxis, MatchesPowerIteration) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Mat3 rot = tk::random_rotation(rng);
    const Vec3 scale(uniform(rng, 20, 60), uniform(rng, 1, 12), uniform(rng, 1, 12));
    std::vector<Vec3> pts(300);
    std::normal_distribution<double> n;
    for (auto& p : pts) p = rot * Vec3(scale.x() * n(rng), scale.y() * n(rng), scale.z() * n(rng));
    const PointCloud cloud(Frame::world, pts);
    EXPECT_LT(sign_free_distance(pca_axis(cloud), power_iteration_top(covariance(cloud))), 1e-6);
  }
}

TEST(PcaAxis, Errors) {
  EXPECT_EQ(code_of([] { pca_axis(PointCloud(Frame::world, {Vec3(0, 0, 0), Vec3(1, 0, 0)})); }),
            ErrorCode::insufficient_points);
  // Cube corners: isotropic covariance.
  std::vector<Vec3> cube;
  for (int i = 0; i < 8; ++i) cube.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  EXPECT_EQ(code_of([&] { pca_axis(PointCloud(Frame::world, cube)); }), ErrorCode::ambiguous_axis);
}

TEST(PcaAxis, ScaleInvariance) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = tk::sample_cylinder(rng, Vec3::Zero(), tk::random_unit(rng), 10, 50, 400);
    const PointCloud cloud(Frame::world, pts);
    const Vec3 c = cloud.centroid();
    const double s = uniform(rng, 0.01, 100.0);
    std::vector<Vec3> scaled(pts);
    for (auto& p : scaled) p = c + s * (p - c);
    EXPECT_LT(sign_free_distance(pca_axis(cloud), pca_axis(PointCloud(Frame::world, scaled))), 1e-9);
  }
}

TEST(AxisEstimation, RotationEquivariance) {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = tk::sample_cylinder(rng, Vec3(0, 0, 300), tk::random_unit(rng), 14, 50, 1500);
    const Mat3 r = tk::random_rotation(rng);
    std::vector<Vec3> rotated(pts);
    for (auto& p : rotated) p = r * p;
    const PointCloud a(Frame::world, pts), b(Frame::world, rotated);
    EXPECT_LT(axis_angle_deg(r * pca_axis(a), pca_axis(b)), 0.2);
    const Vec3 far(1e4, 2e4, -3e4);
    const Vec3 na = normals_axis(estimate_normals(a, 12, far));
    const Vec3 nb = normals_axis(estimate_normals(b, 12, r * far));
    EXPECT_LT(axis_angle_deg(r * na, nb), 0.2);
  }
}

// --- normals --------------------------------------------------------------------

TEST(Normals, PlanarPatchFacesCamera) {
  Rng rng(5);
  std::vector<Vec3> pts;
  for (int i = 0; i < 400; ++i) pts.emplace_back(uniform(rng, -50, 50), uniform(rng, -50, 50), 0.0);
  const PointCloud cloud(Frame::world, pts);
  const auto field = estimate_normals(cloud, 12, Vec3(0, 0, -500));
  EXPECT_EQ(field.k, 12u);
  for (const auto& n : field.normals) EXPECT_LT((n - Vec3(0, 0, -1)).norm(), 1e-9);
  const auto flipped = estimate_normals(cloud, 12, Vec3(0, 0, 500));
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(flipped.normals[i], -field.normals[i]);
}

TEST(Normals, CylinderNormalsOrthogonalToAxis) {
  const Vec3 axis = Vec3(1, 2, 3).normalized();
  const auto pts = tk::cylinder_grid(Vec3::Zero(), axis, 14, 60, 2.0);
  const PointCloud cloud(Frame::world, pts);
  const auto field = estimate_normals(cloud, 12, Vec3(500, 0, 0));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_NEAR(std::abs(field.normals[i].norm()), 1.0, 1e-12);
    EXPECT_LT(std::abs(90.0 - std::acos(std::abs(field.normals[i].dot(axis))) * 180.0 / std::numbers::pi), 3.0);
    EXPECT_GE(field.normals[i].dot(Vec3(500, 0, 0) - pts[i]), 0.0);
  }
}

TEST(Normals, Errors) {
  const PointCloud cloud(Frame::world, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0.1)});
  EXPECT_EQ(code_of([&] { estimate_normals(cloud, 5, Vec3::Zero()); }), ErrorCode::invalid_parameter);
  EXPECT_EQ(code_of([&] { estimate_normals(cloud, 2, Vec3::Zero()); }), ErrorCode::invalid_parameter);
}

TEST(NormalsAxis, OrthogonalComplement) {
  const SurfaceNormalField field{{Vec3::UnitX(), Vec3::UnitY()}, 3};
  EXPECT_LT(sign_free_distance(normals_axis(field), Vec3::UnitZ()), 1e-12);
}

TEST(NormalsAxis, ParallelNormalsAmbiguous) {
  const SurfaceNormalField field{{Vec3::UnitX(), Vec3::UnitX(), -Vec3::UnitX()}, 3};
  EXPECT_EQ(code_of([&] { normals_axis(field); }), ErrorCode::ambiguous_axis);
}

TEST(NormalsAxis, NoiselessCylinder) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec3 axis = tk::random_unit(rng);
    const auto pts = tk::cylinder_grid(Vec3::Zero(), axis, 14, 60, 2.0);
    const auto field = estimate_normals(PointCloud(Frame::world, pts), 12, Vec3(0, 0, -800));
    EXPECT_LT(axis_angle_deg(normals_axis(field), axis), 1.0);
  }
}

TEST(NormalsAxis, MatchesFibonacciGridSearch) {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Vec3> normals;
    const Vec3 axis = tk::random_unit(rng);
    for (int i = 0; i < 200; ++i) {
      Vec3 n = tk::random_unit(rng);
      n = (n - 0.9 * n.dot(axis) * axis).normalized();  // mostly orthogonal to the axis
      normals.push_back(n);
    }
    const Vec3 got = normals_axis(SurfaceNormalField{normals, 12});
    EXPECT_LT(axis_angle_deg(got, grid_search_normals_axis(normals, 100000)), 1.0);
  }
}

TEST(AxisEstimation, MethodsAgreeUnderNoise) {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const double radius = uniform(rng, 10, 16);
    const double length = uniform(rng, 3.0 * radius, 5.0 * radius);  // length / diameter >= 1.5
    const Vec3 axis = tk::random_unit(rng);
    const auto pts = tk::cylinder_grid(Vec3(0, 0, 0), axis, radius, length, 2.0);
    const auto cloud = with_noise(rng, pts, 2.0);
    const Vec3 a = pca_axis(cloud);
    // With 2 mm noise a 12-point neighborhood is about as thin as it is
    // wide, so the normals need a wider one to carry the axis.
    const Vec3 b = normals_axis(estimate_normals(cloud, 24, Vec3(0, 0, -600)));
    EXPECT_LT(axis_angle_deg(a, b), 5.0) << "trial " << trial;
  }
}

// --- direction --------------------------------------------------------------------

TEST(Direction, FlipsToWorldUp) {
  const auto cam = synth::default_camera();
  const PointCloud pts(Frame::world, {Vec3(0, 0, -100), Vec3(0, 0, -50)});
  EXPECT_EQ(disambiguate_direction(Vec3(0, 0, -1), pts, cam), Vec3(0, 0, 1));
  EXPECT_EQ(disambiguate_direction(Vec3(0, 0, 1), pts, cam), Vec3(0, 0, 1));
}

TEST(Direction, HorizontalTeatPointsAwayFromCameraNearEnd) {
  // Teat lying along y; the camera sits at negative y so the near end is the tip.
  const auto cam = synth::default_camera();
  std::vector<Vec3> pts;
  for (int i = 0; i <= 50; ++i) pts.emplace_back(0, -100.0 + i, -120);
  const PointCloud cloud(Frame::world, pts);
  EXPECT_EQ(disambiguate_direction(Vec3(0, -1, 0), cloud, cam), Vec3(0, 1, 0));
  EXPECT_EQ(disambiguate_direction(Vec3(0, 1, 0), cloud, cam), Vec3(0, 1, 0));
}

TEST(Direction, SignRuleOnTiltedTeats) {
  Rng rng(10);
  const auto cam = synth::default_camera();
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 down = tk::tilt(rng, -Vec3::UnitZ(), uniform(rng, 0.0, 30.0));  // base -> tip
    const Vec3 base(uniform(rng, -60, 60), uniform(rng, -40, 40), -50);
    const Vec3 tip = base + 50.0 * down;
    const auto pts = tk::sample_capped_cylinder(rng, tip, -down, 14, 50, 600);
    const PointCloud cloud(Frame::world, pts);
    const Vec3 axis = disambiguate_direction(pca_axis(cloud), cloud, cam);
    EXPECT_GT(axis.dot(base - tip), 0.0) << "trial " << trial;
    EXPECT_GE(axis.dot(Vec3::UnitZ()), 0.0);
  }
}

TEST(Direction, CameraFrameInput) {
  const auto cam = synth::default_camera();
  const PointCloud world(Frame::world, {Vec3(0, 0, -100), Vec3(0, 0, -50), Vec3(1, 0, -75)});
  const PointCloud camera_pts = world.transformed(cam.extrinsic().inverse(), Frame::camera);
  const Vec3 up_cam = cam.extrinsic().rotation().transpose() * Vec3::UnitZ();
  EXPECT_LT((disambiguate_direction(-up_cam, camera_pts, cam) - up_cam).norm(), 1e-12);
}

// --- tip -----------------------------------------------------------------------------

TEST(Tip, NoiselessCappedCylinder) {
  Rng rng(11);
  const auto pts = tk::sample_capped_cylinder(rng, Vec3::Zero(), Vec3::UnitZ(), 14, 50, 4000);
  const PointCloud cloud(Frame::world, pts);
  EXPECT_LT(locate_tip(cloud, Vec3::UnitZ()).norm(), 1.0);

  // The plain slab centroid sits inside the cap, up to a slab above the apex.
  TipParams slab;
  slab.model = TipModel::slab_centroid;
  const Vec3 t = locate_tip(cloud, Vec3::UnitZ(), slab);
  EXPECT_LT(std::hypot(t.x(), t.y()), 1.0);
  EXPECT_GT(t.z(), 0.0);
  EXPECT_LT(t.z(), slab.slab_mm);
}

TEST(Tip, SinglePointIsItsOwnTip) {
  const Vec3 p(3, -4, 5);
  const PointCloud cloud(Frame::world, {p});
  for (const auto model : {TipModel::slab_centroid, TipModel::rounded_cap}) {
    TipParams params;
    params.model = model;
    EXPECT_LT((locate_tip(cloud, Vec3(0.6, 0, 0.8), params) - p).norm(), 1e-12);
  }
}

TEST(Tip, OneMillimeterNoise) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 axis = tk::tilt(rng, Vec3::UnitZ(), uniform(rng, 0, 20));
    const Vec3 tip(uniform(rng, -50, 50), uniform(rng, -50, 50), uniform(rng, -150, -50));
    const auto cloud = with_noise(rng, tk::sample_capped_cylinder(rng, tip, axis, 14, 50, 1500), 1.0);
    EXPECT_LE((locate_tip(cloud, axis) - tip).norm(), 2.0) << "trial " << trial;
  }
}

TEST(Tip, OneSidedVisibility) {
  // Only the half facing -y is seen, as from a camera in front of the teat.
  Rng rng(13);
  std::vector<Vec3> pts;
  for (const auto& p : tk::sample_capped_cylinder(rng, Vec3::Zero(), Vec3::UnitZ(), 14, 50, 6000)) {
    if (p.y() < 0) pts.push_back(p);
  }
  EXPECT_LT(locate_tip(PointCloud(Frame::world, pts), Vec3::UnitZ()).norm(), 0.5);
}

TEST(Tip, QuantileAndCircle) {
  const std::vector<double> v{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
  std::vector<Vec2> arc;
  for (int i = 0; i < 20; ++i) {
    const double a = i * std::numbers::pi / 19.0;  // half circle
    arc.emplace_back(3 + 7 * std::cos(a), -2 + 7 * std::sin(a));
  }
  const auto c = fit_circle(arc);
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(c->radius, 7.0, 1e-9);
  EXPECT_LT((c->center - Vec2(3, -2)).norm(), 1e-9);
  EXPECT_FALSE(fit_circle(std::vector<Vec2>{{0, 0}, {1, 1}}).has_value());
}

TEST(CapsuleFit, RecoversHalfVisibleCapsule) {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 axis = tk::tilt(rng, Vec3::UnitZ(), uniform(rng, 0, 25));
    const Vec3 tip(uniform(rng, -50, 50), uniform(rng, -50, 50), -100);
    const Vec3 view = tk::tilt(rng, Vec3(0, -1, -0.5).normalized(), uniform(rng, 0, 10));
    std::vector<Vec3> pts;
    for (const auto& p : tk::sample_capped_cylinder(rng, tip, axis, 14, 50, 3000)) {
      const Vec3 c = tip + 14 * axis;
      const Vec3 radial = (p - c) - std::max(0.0, (p - c).dot(axis)) * axis;
      if (radial.dot(view) > 0) pts.push_back(p);
    }
    // Start from a deliberately wrong estimate.
    const auto fit = fit_capsule(PointCloud(Frame::world, pts), tip + Vec3(1.5, 1.5, 1.0), tk::tilt(rng, axis, 8.0));
    ASSERT_TRUE(fit.has_value());
    EXPECT_LT((fit->tip() - tip).norm(), 1e-3);
    EXPECT_LT(axis_angle_deg(fit->axis, axis), 1e-3);
    EXPECT_NEAR(fit->radius, 14.0, 1e-3);
  }
}

// --- full estimator ---------------------------------------------------------------

TEST(EstimateTeatPose, VerticalNoiselessTeat) {
  const auto scene = vertical_teat_scene();
  const auto r = synth::render(scene);
  ASSERT_EQ(r.masks.size(), 1u);
  for (const auto method : {AxisMethod::pca, AxisMethod::normals}) {
    pipeline::GeometryParams g;
    g.pose.method = method;
    const auto est = pipeline::estimate_frame(r.cloud, r.masks, scene.camera, g, 0);
    ASSERT_TRUE(est.teats[0].pose.has_value()) << est.teats[0].message;
    const auto& pose = *est.teats[0].pose;
    EXPECT_LT((pose.tip_mm - r.truth.teats[0].tip_mm).norm(), 0.5) << to_string(method);
    EXPECT_LT(axis_angle_deg(pose.axis, r.truth.teats[0].axis), 0.5) << to_string(method);
    EXPECT_GT(pose.axis.dot(r.truth.teats[0].axis), 0.0);
    EXPECT_EQ(pose.method, method);
  }
}

TEST(EstimateTeatPose, MethodsAgreeOnTiltedTeats) {
  Rng rng(21);
  synth::NoiseModel noise;
  noise.a_mm = 2.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto scene = tk::random_single_teat_scene(rng, noise);
    const auto r = synth::render(scene);
    ASSERT_EQ(r.masks.size(), 1u);
    pipeline::GeometryParams pca, normals;
    normals.pose.method = AxisMethod::normals;
    const auto a = pipeline::estimate_frame(r.cloud, r.masks, scene.camera, pca, 0).teats[0].pose;
    const auto b = pipeline::estimate_frame(r.cloud, r.masks, scene.camera, normals, 0).teats[0].pose;
    ASSERT_TRUE(a && b);
    EXPECT_LT(axis_angle_deg(a->axis, b->axis), 5.0);
    EXPECT_LT(axis_angle_deg(a->axis, r.truth.teats[0].axis), 5.0);
  }
}

TEST(EstimateTeatPose, TooFewPoints) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(i, 0, -100 - i);
  EXPECT_EQ(code_of([&] { estimate_teat_pose(PointCloud(Frame::world, pts), synth::default_camera()); }),
            ErrorCode::insufficient_points);
}

TEST(EstimateTeatPose, DeterministicAndWorldFrame) {
  Rng rng(15);
  const auto cloud = with_noise(rng, tk::sample_capped_cylinder(rng, Vec3(0, 0, -110), Vec3::UnitZ(), 14, 50, 800), 1.0);
  const auto cam = synth::default_camera();
  const auto a = estimate_teat_pose(cloud, cam, {}, "T1", 42);
  const auto b = estimate_teat_pose(cloud, cam, {}, "T1", 42);
  EXPECT_EQ(a.tip_mm, b.tip_mm);
  EXPECT_EQ(a.axis, b.axis);
  EXPECT_EQ(a.teat_id, "T1");
  EXPECT_EQ(a.stamp_us, 42);
  EXPECT_NEAR(a.axis.norm(), 1.0, 1e-9);

  // The same points given in the camera frame give the same pose.
  const auto cam_cloud = cloud.transformed(cam.extrinsic().inverse(), Frame::camera);
  const auto c = estimate_teat_pose(cam_cloud, cam, {}, "T1", 42);
  EXPECT_LT((c.tip_mm - a.tip_mm).norm(), 1e-6);
  EXPECT_LT(axis_angle_deg(c.axis, a.axis), 1e-6);
}

// --- pose type --------------------------------------------------------------------------

TEST(TeatPoseType, CanonicalFrame) {
  Rng rng(16);
  for (int i = 0; i < 100; ++i) {
    TeatPose p;
    p.axis = tk::random_unit(rng);
    const Mat3 f = p.frame();
    EXPECT_LT((f.transpose() * f - Mat3::Identity()).norm(), 1e-12);
    EXPECT_NEAR(f.determinant(), 1.0, 1e-12);
    EXPECT_LT((f.col(2) - p.axis).norm(), 1e-12);
  }
}

TEST(TeatPoseType, JsonRoundTrip) {
  TeatPose p{"T2", 99, Vec3(1.25, -2.5, 3.0), Vec3(0, 0.6, 0.8), AxisMethod::normals, 77};
  const auto back = pose_from_json(pose_to_json(p));
  EXPECT_EQ(back.teat_id, p.teat_id);
  EXPECT_EQ(back.stamp_us, p.stamp_us);
  EXPECT_EQ(back.tip_mm, p.tip_mm);
  EXPECT_EQ(back.axis, p.axis);
  EXPECT_EQ(back.method, p.method);
  EXPECT_EQ(back.n_points, p.n_points);
  EXPECT_EQ(code_of([] { parse_axis_method("svd"); }), ErrorCode::parse_error);
}

TEST(TeatPoseType, AxisAngleIgnoresSign) {
  EXPECT_NEAR(axis_angle_deg(Vec3::UnitX(), -Vec3::UnitX()), 0.0, 1e-12);
  EXPECT_NEAR(axis_angle_deg(Vec3::UnitX(), Vec3::UnitY()), 90.0, 1e-12);
  EXPECT_NEAR(axis_angle_deg(Vec3(1, 1e-9, 0), Vec3::UnitX()), 1e-9 * 180.0 / std::numbers::pi, 1e-15);
}
