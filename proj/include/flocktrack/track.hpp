// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "flocktrack/appearance.hpp"
#include "flocktrack/head_tracker.hpp"
#include "flocktrack/kalman.hpp"
#include "flocktrack/types.hpp"

namespace flocktrack {

enum class TrackStatus { kTentative, kConfirmed, kDeleted };

struct TrackLifecycle {
  TrackStatus status = TrackStatus::kTentative;
  int hits = 0;
  int time_since_update = 0;
};

struct Track {
  int id = 0;
  KalmanState kalman;
  TrackLifecycle lifecycle;
  double smoothed_w = 0.0;
  double smoothed_h = 0.0;
  FeatureGallery gallery;
  std::optional<HeadState> head;
  // Box of the most recent associated detection.
  BoundingBox last_box;

  bool confirmed() const { return lifecycle.status == TrackStatus::kConfirmed; }
  bool tentative() const { return lifecycle.status == TrackStatus::kTentative; }
  bool deleted() const { return lifecycle.status == TrackStatus::kDeleted; }
  // Predicted center with the smoothed size.
  BoundingBox predicted_box() const {
    return {kalman.mean(0), kalman.mean(1), smoothed_w, smoothed_h};
  }
};

Track initiate(const Detection& det, int next_id, const MotionConfig& cfg = {},
               int gallery_budget = 100);

// Constant-velocity step; increments time_since_update.
Track predict(Track t, const MotionConfig& cfg = {});

// Kalman correction with the detection center, size EMA, and promotion to
// Confirmed once hits reach cfg.confirm_hits.
Track update(Track t, const Detection& det, const MotionConfig& cfg = {});

// Tentative tracks die on their first miss; confirmed tracks once
// time_since_update exceeds max_age.
Track mark_missed(Track t, int max_age);

double gating_distance(const Track& t, const Detection& det,
                       const MotionConfig& cfg = {});

}  // namespace flocktrack
