#include "teatpose/pipeline/association.hpp"

#include <algorithm>
#include <tuple>

namespace teatpose::pipeline {

TrackAssociator::Result TrackAssociator::associate(const std::vector<pose::TeatPose>& detections) {
  ++frame_;
  Result result;

  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t d = 0; d < detections.size(); ++d) {
    for (std::size_t t = 0; t < tracks_.size(); ++t) {
      const double dist = (detections[d].tip_mm - tracks_[t].last_tip).norm();
      if (dist <= max_distance_mm_) pairs.emplace_back(dist, d, t);
    }
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<int> det_to_track(detections.size(), -1);
  std::vector<bool> track_used(tracks_.size(), false);
  for (const auto& [dist, d, t] : pairs) {
    if (det_to_track[d] >= 0 || track_used[t]) continue;
    det_to_track[d] = static_cast<int>(t);
    track_used[t] = true;
  }
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (det_to_track[d] >= 0 || detections[d].teat_id.empty()) continue;
    for (std::size_t t = 0; t < tracks_.size(); ++t) {
      if (!track_used[t] && tracks_[t].teat_id == detections[d].teat_id) {
        det_to_track[d] = static_cast<int>(t);
        track_used[t] = true;
        break;
      }
    }
  }

  result.track_ids.resize(detections.size());
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (det_to_track[d] < 0) {
      tracks_.push_back({"track-" + std::to_string(next_id_++), detections[d].teat_id, detections[d].tip_mm, frame_});
      result.track_ids[d] = tracks_.back().id;
      continue;
    }
    Track& track = tracks_[static_cast<std::size_t>(det_to_track[d])];
    track.last_tip = detections[d].tip_mm;
    track.teat_id = detections[d].teat_id;
    track.last_seen = frame_;
    result.track_ids[d] = track.id;
  }

  // Tracks missing for more than one frame are gone.
  for (auto it = tracks_.begin(); it != tracks_.end();) {
    if (frame_ - it->last_seen > 1) {
      result.expired.push_back(it->id);
      it = tracks_.erase(it);
    } else {
      ++it;
    }
  }
  return result;
}

}  // namespace teatpose::pipeline
