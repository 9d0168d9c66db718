// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/track.hpp"

namespace flocktrack {

Track initiate(const Detection& det, int next_id, const MotionConfig& cfg,
               int gallery_budget) {
  Track t;
  t.id = next_id;
  t.kalman = kalman_initiate(det.box.center(), det.box.h, cfg);
  t.lifecycle = {TrackStatus::kTentative, 1, 0};
  if (cfg.confirm_hits <= 1) t.lifecycle.status = TrackStatus::kConfirmed;
  t.smoothed_w = det.box.w;
  t.smoothed_h = det.box.h;
  t.gallery = FeatureGallery(gallery_budget);
  t.last_box = det.box;
  return t;
}

Track predict(Track t, const MotionConfig& cfg) {
  if (t.deleted()) return t;
  t.kalman = kalman_predict(t.kalman, t.smoothed_h, cfg);
  t.lifecycle.time_since_update += 1;
  return t;
}

Track update(Track t, const Detection& det, const MotionConfig& cfg) {
  if (t.deleted()) return t;
  t.kalman = kalman_update(t.kalman, det.box.center(), t.smoothed_h, cfg);
  const double a = cfg.size_smoothing;
  t.smoothed_w = a * det.box.w + (1.0 - a) * t.smoothed_w;
  t.smoothed_h = a * det.box.h + (1.0 - a) * t.smoothed_h;
  t.lifecycle.hits += 1;
  t.lifecycle.time_since_update = 0;
  if (t.tentative() && t.lifecycle.hits >= cfg.confirm_hits) {
    t.lifecycle.status = TrackStatus::kConfirmed;
  }
  t.last_box = det.box;
  return t;
}

Track mark_missed(Track t, int max_age) {
  if (t.tentative()) {
    t.lifecycle.status = TrackStatus::kDeleted;
    t.lifecycle.hits = 0;
  } else if (t.confirmed() && t.lifecycle.time_since_update > max_age) {
    t.lifecycle.status = TrackStatus::kDeleted;
  }
  return t;
}

double gating_distance(const Track& t, const Detection& det,
                       const MotionConfig& cfg) {
  return mahalanobis_squared(t.kalman, det.box.center(), t.smoothed_h, cfg);
}

}  // namespace flocktrack
