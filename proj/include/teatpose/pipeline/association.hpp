#pragma once

#include "teatpose/pose/teat_pose.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace teatpose::pipeline {

/// Assigns per-frame pose detections to persistent tracks. Detections go to
/// the nearest live track whose last tip is within `max_distance_mm`
/// (greedy by distance). Leftover detections fall back to a live, still
/// unmatched track carrying the same mask teat id. Anything else opens a
/// new track. A track unseen for more than one frame expires.
class TrackAssociator {
 public:
  explicit TrackAssociator(double max_distance_mm = 15.0) : max_distance_mm_(max_distance_mm) {}

  struct Result {
    std::vector<std::string> track_ids;  // parallel to the detections
    std::vector<std::string> expired;
  };

  Result associate(const std::vector<pose::TeatPose>& detections);

 private:
  struct Track {
    std::string id;
    std::string teat_id;
    Vec3 last_tip;
    std::int64_t last_seen = 0;
  };

  double max_distance_mm_;
  std::vector<Track> tracks_;
  std::int64_t frame_ = 0;
  int next_id_ = 1;
};

}  // namespace teatpose::pipeline
