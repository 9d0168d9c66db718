// SPDX-License-Identifier: Apache-2.0
//
// CLEAR-MOT tracking scores and event-level behavior scores.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "flocktrack/behavior.hpp"
#include "flocktrack/types.hpp"

namespace flocktrack {

struct IdentifiedBox {
  int id = 0;
  BoundingBox box;
};

struct FrameTally {
  int misses = 0;
  int false_positives = 0;
  int mismatches = 0;
  int objects = 0;  // ground-truth count
  int matches = 0;
  std::vector<double> distances;  // one per match, pixels
};

// gt id -> hyp id. Carries identities across frames.
using Correspondence = std::map<int, int>;

struct FrameResult {
  Correspondence current;  // pairs matched in this frame
  FrameTally tally;
};

// One CLEAR-MOT frame step. `last_seen` holds, for every gt id ever matched,
// the hyp id it was last matched to; it is updated in place and decides
// mismatches. Pairs from the previous frame that are still within
// `match_radius` are kept before the remaining objects are assigned.
FrameResult correspond_frame(std::span<const IdentifiedBox> gt,
                             std::span<const IdentifiedBox> hyp,
                             const Correspondence& previous,
                             Correspondence& last_seen,
                             double match_radius = 50.0);

// Throws kEmptyGroundTruth when there are no ground-truth objects.
double mota(std::span<const FrameTally> tallies);
// Throws kNoMatches when nothing was matched.
double motp(std::span<const FrameTally> tallies);

struct MotSummary {
  long misses = 0;
  long false_positives = 0;
  long mismatches = 0;
  long objects = 0;
  long matches = 0;
  double distance_sum = 0.0;
  std::optional<double> mota;
  std::optional<double> motp;
  // Majority gt id per hyp id over matched frames.
  std::map<int, int> hyp_to_gt;

  friend bool operator==(const MotSummary&, const MotSummary&) = default;
};

// Runs correspond_frame over a whole clip. Inputs need not be sorted.
MotSummary evaluate_tracks(std::span<const TrackRecord> gt,
                           std::span<const TrackRecord> hyp,
                           double match_radius = 50.0, bool use_heads = false);

struct TimeInterval {
  double start = 0.0;
  double end = 0.0;
};

double interval_iou(TimeInterval a, TimeInterval b);

// Frame interval [start, end] covers [start / fps, (end + 1) / fps).
TimeInterval to_seconds(const BehaviorEvent& e, double fps);

struct EventMatchReport {
  int true_positives = 0;
  int insertions = 0;
  int deletions = 0;
  std::vector<std::pair<int, int>> pairs;  // (gt index, hyp index)
  std::vector<double> ious;
  double precision = 1.0;
  double recall = 1.0;
  double mean_iou = 0.0;

  friend bool operator==(const EventMatchReport&, const EventMatchReport&) = default;
};

// Greedy matching by descending interval IOU; a pair needs the same
// track_id and kind and IOU > 0. Ties break on (gt index, hyp index).
EventMatchReport match_events(std::span<const BehaviorEvent> gt,
                              std::span<const BehaviorEvent> hyp, double fps);

struct ClipScore {
  std::optional<MotSummary> body;
  std::optional<MotSummary> head;
  std::map<BehaviorKind, EventMatchReport> behavior;

  friend bool operator==(const ClipScore&, const ClipScore&) = default;
};

}  // namespace flocktrack
