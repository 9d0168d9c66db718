// SPDX-License-Identifier: Apache-2.0
//
// Rule-based walking / eating / drinking events from body and head
// trajectories. Frame intervals are inclusive on both ends.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flocktrack/types.hpp"

namespace flocktrack {

enum class BehaviorKind { kWalking = 0, kEating = 1, kDrinking = 2 };

std::string_view to_string(BehaviorKind k);
// Accepts "walking"/"walk", "eating"/"eat", "drinking"/"drink".
std::optional<BehaviorKind> parse_behavior_kind(std::string_view s);

struct BehaviorEvent {
  int track_id = 0;
  BehaviorKind kind = BehaviorKind::kWalking;
  int start = 0;  // frame
  int end = 0;    // frame, inclusive
  bool low_confidence = false;

  friend bool operator==(const BehaviorEvent&, const BehaviorEvent&) = default;
};

struct BehaviorConfig {
  double threshold_px = 60.0;
  double window_s = 3.0;
  // When > 0, overrides threshold_px with body lengths per second times the
  // smoothed box height times window_s.
  double threshold_body_lengths_per_s = 0.0;
  bool use_displacement = false;  // net displacement instead of path length
  // Half-width of the centered difference used to decide which frames of a
  // triggered bout are actually moving.
  double speed_halfwindow_s = 0.2;
  double max_gap_s = 3.0;  // longer trajectory gaps split the trajectory
  double margin_px = 15.0;
  double min_dwell_s = 1.0;
  double min_gap_s = 3.0;
};

struct TrajectoryPoint {
  int frame = 0;
  Point p;
};

// Walking events for one track. `trajectory` must be sorted by frame.
std::vector<BehaviorEvent> detect_walking(std::span<const TrajectoryPoint> trajectory,
                                          int track_id, double fps,
                                          const BehaviorConfig& cfg = {},
                                          double body_height = 0.0);

// Per-frame input for fixture proximity: the tracked head center when
// available, otherwise the body box (low-confidence fallback).
struct ProximitySample {
  int frame = 0;
  std::optional<Point> head;
  std::optional<BoundingBox> body;
};

// Eating / drinking events for one track. Throws kLayoutMissing when both
// fixtures are absent.
std::vector<BehaviorEvent> detect_feeding(std::span<const ProximitySample> samples,
                                          int track_id, const PenLayout& layout,
                                          double fps, const BehaviorConfig& cfg = {});

// Coalesces same-(track, kind) events whose gap (frames strictly between
// them) is shorter than min_gap_s. Input in any order; output sorted by
// (track_id, kind, start).
std::vector<BehaviorEvent> merge_events(std::vector<BehaviorEvent> events,
                                        double fps, double min_gap_s = 3.0);

struct BehaviorStats {
  int count = 0;
  double total_s = 0.0;
  double mean_s = 0.0;

  friend bool operator==(const BehaviorStats&, const BehaviorStats&) = default;
};

using BehaviorSummary = std::map<std::pair<int, BehaviorKind>, BehaviorStats>;

BehaviorSummary summarize(std::span<const BehaviorEvent> events, double fps);

}  // namespace flocktrack
