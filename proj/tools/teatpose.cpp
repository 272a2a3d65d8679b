#include "teatpose/errors.hpp"
#include "teatpose/geom/json_io.hpp"
#include "teatpose/harness/experiments.hpp"
#include "teatpose/harness/report_writer.hpp"
#include "teatpose/pipeline/pipeline.hpp"
#include "teatpose/synth/scene.hpp"
#include "teatpose/text.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace tp = teatpose;

namespace {

std::uint64_t master_seed(std::uint64_t fallback) {
  const char* env = std::getenv("TEATPOSE_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used == std::string(env).size()) return v;
  } catch (const std::exception&) {
  }
  throw tp::Error(tp::ErrorCode::invalid_parameter, std::string("TEATPOSE_SEED is not an unsigned integer: ") + env);
}

tp::synth::SceneSpec load_scene(const std::string& path) {
  if (path.empty()) return tp::synth::default_scene();
  return tp::synth::scene_from_json(tp::geom::read_json_file(path));
}

tp::pipeline::PipelineConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return tp::pipeline::config_from_json(tp::geom::read_json_file(path));
}

// Accepts ["none", "noisy"], {"presets": [...]} or entries of the form
// {"name": ..., "noise": <preset name or noise object>}.
std::vector<tp::harness::NamedNoise> load_presets(const std::string& path, std::vector<double>* distances) {
  if (path.empty()) {
    std::vector<tp::harness::NamedNoise> out;
    for (const char* name : {"none", "orbbec-like", "noisy"}) out.push_back({name, tp::synth::noise_preset(name)});
    return out;
  }
  tp::geom::Json j = tp::geom::read_json_file(path);
  if (j.is_object() && j.contains("distances_mm")) *distances = j.at("distances_mm").get<std::vector<double>>();
  const tp::geom::Json list = j.is_object() ? j.at("presets") : j;
  std::vector<tp::harness::NamedNoise> out;
  for (const auto& entry : list) {
    if (entry.is_string()) {
      const auto name = entry.get<std::string>();
      out.push_back({name, tp::synth::noise_preset(name)});
    } else {
      out.push_back({entry.at("name").get<std::string>(), tp::synth::noise_from_json(entry.at("noise"))});
    }
  }
  return out;
}

void print_written(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

int run_repeatability(const std::string& scene_path, std::size_t cycles, const std::string& noise, std::uint64_t seed,
                      const std::string& out, bool timing) {
  tp::harness::RepeatabilityOptions opt;
  opt.scene = load_scene(scene_path);
  opt.noise = tp::synth::noise_preset(noise);
  opt.cycles = cycles;
  opt.seed = master_seed(seed);
  const auto report = tp::harness::cmd_repeatability(opt);
  std::cout << "teat   n    mean_mm  std_mm  success<5mm\n";
  for (const auto& r : report.teats) {
    std::cout << r.teat_id << "    " << r.samples << "  " << tp::fixed(r.mean_error_mm, 3) << "   "
              << tp::fixed(r.std_error_mm, 3) << "   " << tp::fixed(r.success_rate, 3) << '\n';
  }
  std::cout << "overall success " << tp::fixed(report.success_rate, 4) << '\n';
  print_written(tp::harness::write_repeatability(out, report, timing));
  return report.samples.size() == cycles * report.teats.size() ? 0 : 1;
}

int run_camera_curve(const std::string& presets, std::vector<double> distances, std::uint64_t seed,
                     const std::string& out) {
  tp::harness::CurveOptions opt;
  opt.presets = load_presets(presets, &opt.distances_mm);
  if (!distances.empty()) opt.distances_mm = std::move(distances);
  opt.seed = master_seed(seed);
  const auto report = tp::harness::cmd_camera_curve(opt);
  for (const auto& f : report.fits) {
    std::cout << f.preset << ": ";
    if (f.fit) {
      std::cout << "a=" << tp::fixed(f.fit->a_mm, 4) << " mm, b=" << tp::fixed(f.fit->b_mm_per_m2, 4)
                << " mm/m^2, max error up to 1 m " << tp::fixed(f.fit->max_error_1m_mm, 4) << " mm";
    } else {
      std::cout << "no fit";
    }
    if (!f.warning.empty()) std::cout << " (" << f.warning << ')';
    std::cout << '\n';
  }
  print_written(tp::harness::write_camera_curve(out, report));
  return 0;
}

int run_rate(const std::string& scene_path, std::vector<int> strides, std::size_t repeats, const std::string& out) {
  tp::harness::RateOptions opt;
  opt.scene = load_scene(scene_path);
  opt.strides = std::move(strides);
  opt.repeats = repeats;
  const auto report = tp::harness::cmd_rate_bench(opt);
  std::cout << "stride  vertices  geometry_mean_ms  geometry_p95_ms  tip_delta_mm\n";
  for (const auto& r : report.rows) {
    std::cout << r.stride << "       " << r.contour_vertices << "      " << tp::fixed(r.geometry_mean_ms, 3)
              << "           " << tp::fixed(r.geometry_p95_ms, 3) << "          " << tp::fixed(r.max_tip_delta_mm, 4)
              << '\n';
  }
  print_written(tp::harness::write_rate(out, report, true));
  return 0;
}

int run_pipeline_cmd(const std::string& scene_path, const std::string& config_path, const std::string& events,
                     const std::string& summary, std::size_t frames, std::uint64_t seed) {
  auto scene = load_scene(scene_path);
  if (const char* env = std::getenv("TEATPOSE_SEED"); env != nullptr && *env != '\0') scene.seed = master_seed(0);
  else if (seed != 0) scene.seed = seed;
  const auto config = load_config(config_path);
  const tp::pipeline::StaticSceneStream stream(scene, frames);
  const auto result = tp::pipeline::run_pipeline(stream, config);

  std::ofstream log(events, std::ios::binary);
  if (!log) throw tp::Error(tp::ErrorCode::invalid_input, "cannot write " + events);
  for (const auto& e : result.events) log << e.dump() << '\n';
  if (!summary.empty()) {
    std::ofstream csv(summary, std::ios::binary);
    if (!csv) throw tp::Error(tp::ErrorCode::invalid_input, "cannot write " + summary);
    csv << tp::pipeline::pipeline_summary_csv(result);
  }
  std::cout << result.frames.size() << " of " << frames << " frames processed, " << result.tracks.size()
            << " tracks, simulated " << tp::fixed(result.simulated_fps, 3) << " FPS";
  if (result.all_gates_fired_us) std::cout << ", all gates fired after " << *result.all_gates_fired_us / 1000 << " ms";
  std::cout << '\n';
  if (result.invariant_violations > 0) {
    std::cerr << result.invariant_violations << " invariant violation(s) logged\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teat tip pose estimation from RGB-D masks: experiments and pipeline replay"};
  app.require_subcommand(1);

  std::string scene_path, out = "report", noise = "orbbec-like", presets, config_path, events = "events.jsonl",
                          summary;
  std::size_t cycles = 789, repeats = 20, frames = 50;
  std::uint64_t seed = 1;
  bool timing = false;
  std::vector<int> strides{1, 2, 5, 10};
  std::vector<double> distances;

  auto* rep = app.add_subcommand("repeatability", "Repeated tip estimation against ground truth");
  rep->add_option("--scene", scene_path, "Scene JSON (default scene when omitted)");
  rep->add_option("--cycles", cycles, "Estimation cycles")->check(CLI::PositiveNumber);
  rep->add_option("--noise", noise, "Noise preset: none, orbbec-like, noisy");
  rep->add_option("--seed", seed, "Master seed (TEATPOSE_SEED overrides)");
  rep->add_option("--out", out, "Output directory");
  rep->add_flag("--timing", timing, "Also write wall-clock stage timings");

  auto* curve = app.add_subcommand("camera-curve", "Depth error versus distance on a plane target");
  curve->add_option("--presets", presets, "Presets JSON (none, orbbec-like and noisy when omitted)");
  curve->add_option("--distances", distances, "Distances in mm")->delimiter(',');
  curve->add_option("--seed", seed, "Master seed (TEATPOSE_SEED overrides)");
  curve->add_option("--out", out, "Output directory");

  auto* rate = app.add_subcommand("rate", "Geometry path timing per contour stride");
  rate->add_option("--scene", scene_path, "Scene JSON (default scene when omitted)");
  rate->add_option("--strides", strides, "Contour strides")->delimiter(',');
  rate->add_option("--repeats", repeats, "Timed repetitions per stride")->check(CLI::PositiveNumber);
  rate->add_option("--out", out, "Output directory");

  std::uint64_t run_seed = 0;
  auto* run = app.add_subcommand("run", "Replay a scene stream through the pipeline");
  run->add_option("--scene", scene_path, "Scene JSON (default scene when omitted)");
  run->add_option("--config", config_path, "Pipeline config JSON");
  run->add_option("--events", events, "JSON-lines event log");
  run->add_option("--summary", summary, "Per-track summary CSV");
  run->add_option("--frames", frames, "Camera frames to stream")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_seed, "Base noise seed (TEATPOSE_SEED overrides)");

  std::string dump_path;
  auto* dump_scene = app.add_subcommand("scene", "Write the default scene as JSON");
  dump_scene->add_option("--out", dump_path, "Output file")->required();
  auto* dump_config = app.add_subcommand("config", "Write the default pipeline config as JSON");
  dump_config->add_option("--out", dump_path, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rep) return run_repeatability(scene_path, cycles, noise, seed, out, timing);
    if (*curve) return run_camera_curve(presets, distances, seed, out);
    if (*rate) return run_rate(scene_path, strides, repeats, out);
    if (*run) return run_pipeline_cmd(scene_path, config_path, events, summary, frames, run_seed);
    if (*dump_scene) tp::geom::write_json_file(dump_path, tp::synth::scene_to_json(tp::synth::default_scene()));
    if (*dump_config) tp::geom::write_json_file(dump_path, tp::pipeline::config_to_json({}));
    return 0;
  } catch (const tp::Error& e) {
    std::cerr << "error [" << tp::to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
