#include "teatpose/errors.hpp"
#include "teatpose/pipeline/pipeline.hpp"

namespace teatpose::pipeline {

namespace {

pose::TipModel parse_tip_model(const std::string& name) {
  if (name == "rounded_cap") return pose::TipModel::rounded_cap;
  if (name == "slab_centroid") return pose::TipModel::slab_centroid;
  throw Error(ErrorCode::parse_error, "unknown tip model '" + name + "'");
}

}  // namespace

void LatencyModel::validate() const {
  if (!(inference_ms >= 0.0) || !(network_ms >= 0.0) || !(geometry_budget_ms >= 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "latencies must be >= 0");
  }
}

void PipelineConfig::validate() const {
  latency.validate();
  gate.validate();
  if (!(camera_fps > 0.0)) throw Error(ErrorCode::invalid_parameter, "camera_fps must be > 0");
  if (geometry.contour_stride < 1) throw Error(ErrorCode::invalid_parameter, "contour_stride must be >= 1");
  if (!(geometry.voxel_leaf_mm > 0.0)) throw Error(ErrorCode::invalid_parameter, "voxel_leaf_mm must be > 0");
  if (!(association_mm > 0.0)) throw Error(ErrorCode::invalid_parameter, "association_mm must be > 0");
}

geom::Json config_to_json(const PipelineConfig& c) {
  const auto& p = c.geometry.pose;
  return {{"latency",
           {{"inference_ms", c.latency.inference_ms},
            {"network_ms", c.latency.network_ms},
            {"geometry_budget_ms", c.latency.geometry_budget_ms}}},
          {"gate", {{"window", c.gate.window}, {"pos_tol_mm", c.gate.pos_tol_mm}, {"axis_tol_deg", c.gate.axis_tol_deg}}},
          {"geometry",
           {{"contour_stride", c.geometry.contour_stride},
            {"voxel_leaf_mm", c.geometry.voxel_leaf_mm},
            {"method", std::string(pose::to_string(p.method))},
            {"min_points", p.min_points},
            {"cluster_tolerance_mm", p.cluster.tolerance_mm},
            {"normals_k", p.normals_k},
            {"tip_percentile", p.tip.percentile},
            {"tip_slab_mm", p.tip.slab_mm},
            {"tip_model", p.tip.model == pose::TipModel::rounded_cap ? "rounded_cap" : "slab_centroid"},
            {"refine_capsule", p.refine_capsule}}},
          {"camera_fps", c.camera_fps},
          {"association_mm", c.association_mm},
          {"approach_standoff_mm", c.approach_standoff_mm},
          {"queue_capacity", c.queue_capacity}};
}

PipelineConfig config_from_json(const geom::Json& j) {
  PipelineConfig c;
  try {
    if (j.contains("latency")) {
      const auto& l = j.at("latency");
      c.latency.inference_ms = l.value("inference_ms", c.latency.inference_ms);
      c.latency.network_ms = l.value("network_ms", c.latency.network_ms);
      c.latency.geometry_budget_ms = l.value("geometry_budget_ms", c.latency.geometry_budget_ms);
    }
    if (j.contains("gate")) {
      const auto& g = j.at("gate");
      c.gate.window = g.value("window", c.gate.window);
      c.gate.pos_tol_mm = g.value("pos_tol_mm", c.gate.pos_tol_mm);
      c.gate.axis_tol_deg = g.value("axis_tol_deg", c.gate.axis_tol_deg);
    }
    if (j.contains("geometry")) {
      const auto& g = j.at("geometry");
      auto& p = c.geometry.pose;
      c.geometry.contour_stride = g.value("contour_stride", c.geometry.contour_stride);
      c.geometry.voxel_leaf_mm = g.value("voxel_leaf_mm", c.geometry.voxel_leaf_mm);
      if (g.contains("method")) p.method = pose::parse_axis_method(g.at("method").get<std::string>());
      p.min_points = g.value("min_points", p.min_points);
      p.cluster.tolerance_mm = g.value("cluster_tolerance_mm", p.cluster.tolerance_mm);
      p.normals_k = g.value("normals_k", p.normals_k);
      p.tip.percentile = g.value("tip_percentile", p.tip.percentile);
      p.tip.slab_mm = g.value("tip_slab_mm", p.tip.slab_mm);
      p.refine_capsule = g.value("refine_capsule", p.refine_capsule);
      if (g.contains("tip_model")) p.tip.model = parse_tip_model(g.at("tip_model").get<std::string>());
    }
    c.camera_fps = j.value("camera_fps", c.camera_fps);
    c.association_mm = j.value("association_mm", c.association_mm);
    c.approach_standoff_mm = j.value("approach_standoff_mm", c.approach_standoff_mm);
    c.queue_capacity = j.value("queue_capacity", c.queue_capacity);
  } catch (const geom::Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("pipeline config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace teatpose::pipeline
